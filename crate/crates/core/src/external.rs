//! Adapter for expensive evaluations backed by a user subprocess.
//!
//! Protocol: the adapter writes one line to the child's stdin containing
//! the decision vector as whitespace-separated decimals, then reads one
//! line from stdout: the objective followed by one value per constraint,
//! or the single token `FAIL` to signal a hidden failure (simulation
//! crash). Any malformed reply or process error also counts as a crash.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::sync::Arc;

use crate::problem::{ConstraintKind, ProblemError, ProblemSpec, RawEvaluate, RawEvaluation};

/// Subprocess-backed oracle. One process is spawned per evaluation.
pub struct ExternalCommand {
    pub program: String,
    pub args: Vec<String>,
    constraint_count: usize,
}

impl ExternalCommand {
    fn crash(&self) -> RawEvaluation<f64> {
        RawEvaluation {
            objective: f64::NAN,
            constraints: vec![f64::NAN; self.constraint_count],
            crashed: true,
        }
    }

    fn run(&self, x: &[f64]) -> std::io::Result<Option<String>> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        {
            let stdin = child.stdin.as_mut().expect("piped stdin");
            let line: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
            writeln!(stdin, "{}", line.join(" "))?;
        }
        let stdout = child.stdout.take().expect("piped stdout");
        let mut reply = String::new();
        BufReader::new(stdout).read_line(&mut reply)?;
        let status = child.wait()?;
        Ok(status.success().then(|| reply.trim().to_string()))
    }
}

impl RawEvaluate<f64> for ExternalCommand {
    fn eval(&self, x: &[f64]) -> RawEvaluation<f64> {
        let Ok(Some(reply)) = self.run(x) else {
            return self.crash();
        };
        if reply == "FAIL" {
            return self.crash();
        }
        let values: Vec<f64> = reply
            .split_whitespace()
            .map_while(|tok| tok.parse::<f64>().ok())
            .collect();
        if values.len() != self.constraint_count + 1 {
            return self.crash();
        }
        RawEvaluation {
            objective: values[0],
            constraints: values[1..].to_vec(),
            crashed: false,
        }
    }
}

/// Problem whose objective and constraints come from `program args...`.
pub fn external_problem(
    name: impl Into<String>,
    program: impl Into<String>,
    args: Vec<String>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    kinds: Vec<ConstraintKind>,
) -> Result<ProblemSpec<f64>, ProblemError> {
    let oracle = ExternalCommand {
        program: program.into(),
        args,
        constraint_count: kinds.len(),
    };
    ProblemSpec::from_oracle(name, lower, upper, kinds, Arc::new(oracle))
}
