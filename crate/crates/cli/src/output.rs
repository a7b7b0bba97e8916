use serde_json::{json, Value};

/// Bumped whenever a `--json` payload changes shape.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    SelftestFailed,
    BudgetExhausted,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::SelftestFailed => 1,
            Status::BudgetExhausted => 3,
        }
    }
}

/// What a subcommand produced, in both output modes.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub text: String,
    pub json: Value,
    pub status: Status,
}

impl Report {
    pub fn new(command: &'static str, text: String, json: Value) -> Self {
        Self {
            command,
            text,
            json,
            status: Status::Ok,
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn render(&self, as_json: bool) -> String {
        let mut out = if as_json {
            let envelope = json!({
                "schema_version": SCHEMA_VERSION,
                "command": self.command,
                "result": self.json,
            });
            serde_json::to_string_pretty(&envelope).expect("JSON values serialize")
        } else {
            self.text.clone()
        };
        if !out.ends_with('\n') {
            out.push('\n');
        }
        out
    }
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

/// Rows of a table as JSON objects keyed by the header.
pub fn json_rows(header: &[&str], rows: &[Vec<String>]) -> Value {
    rows.iter()
        .map(|row| {
            header
                .iter()
                .zip(row)
                .map(|(key, cell)| ((*key).to_string(), cell_value(cell)))
                .collect::<serde_json::Map<_, _>>()
                .into()
        })
        .collect::<Vec<Value>>()
        .into()
}

/// Integers and floats as JSON numbers, empty cells as null, the rest
/// (exact rationals) as strings.
fn cell_value(cell: &str) -> Value {
    if cell.is_empty() {
        Value::Null
    } else if let Ok(k) = cell.parse::<i64>() {
        k.into()
    } else if let Some(x) = cell.parse::<f64>().ok().filter(|x| x.is_finite()) {
        x.into()
    } else {
        cell.into()
    }
}
