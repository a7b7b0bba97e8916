use std::error::Error;

use solvable_walks::asymptotics::AsymptoticsError;
use solvable_walks::exclusive::ExclusiveError;
use solvable_walks::group::GroupError;
use solvable_walks::measures::MeasureError;
use solvable_walks::words::WordError;
use thiserror::Error;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

/// Malformed command-line or manifest input.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

/// Exit code for an error: parse errors and budget exhaustion are told
/// apart from every other failure.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain().find_map(classify).unwrap_or(EXIT_FAILURE)
}

fn classify(cause: &(dyn Error + 'static)) -> Option<u8> {
    if cause.is::<UsageError>()
        || cause.is::<WordError>()
        || cause.is::<clap::Error>()
        || cause.is::<serde_json::Error>()
    {
        return Some(EXIT_PARSE);
    }
    if let Some(err) = cause.downcast_ref::<GroupError>() {
        return group(err);
    }
    if let Some(err) = cause.downcast_ref::<MeasureError>() {
        return measure(err);
    }
    if let Some(err) = cause.downcast_ref::<AsymptoticsError>() {
        return match err {
            AsymptoticsError::BudgetExceeded { .. } => Some(EXIT_BUDGET),
            AsymptoticsError::Measure(err) => measure(err),
            AsymptoticsError::Group(err) => group(err),
            _ => None,
        };
    }
    if let Some(err) = cause.downcast_ref::<ExclusiveError>() {
        return match err {
            ExclusiveError::Group(err) => group(err),
            ExclusiveError::Word(_) => Some(EXIT_PARSE),
            _ => None,
        };
    }
    None
}

fn group(err: &GroupError) -> Option<u8> {
    match err {
        GroupError::Spec { .. } | GroupError::Word(_) => Some(EXIT_PARSE),
        GroupError::BudgetExceeded { .. } => Some(EXIT_BUDGET),
        _ => None,
    }
}

fn measure(err: &MeasureError) -> Option<u8> {
    match err {
        MeasureError::BudgetExceeded { .. } => Some(EXIT_BUDGET),
        MeasureError::Group(err) => group(err),
        _ => None,
    }
}
