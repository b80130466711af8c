use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    pub fn from_pass(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

/// Machine-readable result of one subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub status: Status,
    pub tolerances: Value,
}

impl RunReport {
    pub fn new(command: &str, inputs: Value, results: Value, status: Status, tolerances: Value) -> Self {
        Self { schema_version: SCHEMA_VERSION, command: command.to_string(), inputs, results, status, tolerances }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"));
        s.push('\n');
        s
    }
}

/// Nine significant digits for human-readable output.
pub fn human(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    plain(rounded)
}

/// Shortest round-trip representation, switching to exponent form outside
/// `[1e-5, 1e10)`.
pub fn plain(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e10).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV cell for an optional number; empty when absent.
pub fn opt_cell(x: Option<f64>) -> String {
    x.map(plain).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(human(std::f64::consts::PI), "3.14159265");
        assert_eq!(human(2.0), "2");
        assert_eq!(plain(1e-20), "1e-20");
        assert_eq!(plain(0.25), "0.25");
        assert_eq!(plain(-3.5e12), "-3.5e12");
        assert_eq!(opt_cell(None), "");
        let x = 0.1 + 0.2;
        assert_eq!(plain(x).parse::<f64>().unwrap(), x);
    }
}
