use rayon::prelude::*;
use serde::Serialize;
use thetablock::{rational, Error, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub description: String,
    pub anchor: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub campaign: String,
    pub qprec: [i128; 2],
    pub fj_order: Option<usize>,
    pub grid_bound: Option<i64>,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    /// 0 when everything passed, 1 on any failure, 3 when something was
    /// skipped for lack of precision and nothing failed.
    pub fn exit_code(&self) -> u8 {
        if self.count(Status::Fail) > 0 {
            1
        } else if self.count(Status::Skipped) > 0 {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// What a check body decided; errors from the engine are mapped by [`Outcome::from_error`].
pub enum Outcome {
    Pass(String),
    Fail(String),
    Skipped(String),
}

impl Outcome {
    pub fn from_error(e: Error) -> Self {
        match e {
            Error::PrecisionExhausted { .. } => Outcome::Skipped(e.to_string()),
            e => Outcome::Fail(format!("error: {e}")),
        }
    }

    pub fn expect(cond: bool, pass: impl Into<String>, fail: impl Into<String>) -> Self {
        if cond {
            Outcome::Pass(pass.into())
        } else {
            Outcome::Fail(fail.into())
        }
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome::from_error(e)
    }
}

type Body<'a> = Box<dyn Fn() -> Result<Outcome, Error> + Send + Sync + 'a>;

pub struct Task<'a> {
    description: String,
    anchor: &'static str,
    body: Body<'a>,
}

pub fn task<'a>(
    description: impl Into<String>,
    anchor: &'static str,
    body: impl Fn() -> Result<Outcome, Error> + Send + Sync + 'a,
) -> Task<'a> {
    Task { description: description.into(), anchor, body: Box::new(body) }
}

/// Runs the tasks concurrently; results keep the task order.
pub fn run_all(tasks: Vec<Task<'_>>) -> Vec<CheckResult> {
    tasks
        .into_par_iter()
        .map(|t| {
            let out = (t.body)().unwrap_or_else(Outcome::from_error);
            let (status, detail) = match out {
                Outcome::Pass(d) => (Status::Pass, d),
                Outcome::Fail(d) => (Status::Fail, d),
                Outcome::Skipped(d) => (Status::Skipped, d),
            };
            CheckResult { description: t.description, anchor: t.anchor.to_string(), status, detail }
        })
        .collect()
}

pub fn rat_pair(r: &Rat) -> [i128; 2] {
    rational::to_pair(r)
}
