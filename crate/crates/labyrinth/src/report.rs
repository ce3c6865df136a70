//! Machine-readable check reports. Rows serialize as
//! `{"check":...,"params":...,"status":"pass|fail","witness":...}` with the
//! violating inputs attached on failure.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn of(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Status::Pass)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub params: Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl CheckRow {
    pub fn pass(check: &str, params: Value) -> CheckRow {
        CheckRow { check: check.into(), params, status: Status::Pass, witness: None, data: None }
    }

    pub fn fail(check: &str, params: Value, witness: Value) -> CheckRow {
        CheckRow {
            check: check.into(),
            params,
            status: Status::Fail,
            witness: Some(witness),
            data: None,
        }
    }

    pub fn with_data(mut self, data: Value) -> CheckRow {
        self.data = Some(data);
        self
    }
}
