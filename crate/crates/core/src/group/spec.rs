//! Group spec strings: `zr:R`, `tm:m1,…`, `ll:Q`, `bs:Q`, `sdr:D,R`,
//! `wr(LAMP, BASE)` and `mark(GROUP| w1; w2; …)`.

use std::str::FromStr;

use super::marked::{GroupError, MarkedGroup};
use crate::words::ReducedWord;

impl FromStr for MarkedGroup {
    type Err = GroupError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        parse(spec.trim()).map_err(|message| match message {
            ParseFailure::Message(message) => GroupError::Spec {
                spec: spec.to_string(),
                message,
            },
            ParseFailure::Group(err) => err,
        })
    }
}

enum ParseFailure {
    Message(String),
    Group(GroupError),
}

impl From<GroupError> for ParseFailure {
    fn from(err: GroupError) -> Self {
        ParseFailure::Group(err)
    }
}

fn fail<T>(message: impl Into<String>) -> Result<T, ParseFailure> {
    Err(ParseFailure::Message(message.into()))
}

fn parse(spec: &str) -> Result<MarkedGroup, ParseFailure> {
    if let Some(inner) = strip_call(spec, "wr") {
        let parts = split_top_level(inner, ',');
        if parts.len() != 2 {
            return fail("wr(…) takes a lamp group and a base group");
        }
        return Ok(MarkedGroup::wreath(
            &parse(parts[0].trim())?,
            &parse(parts[1].trim())?,
        )?);
    }
    if let Some(inner) = strip_call(spec, "mark") {
        let Some((group, words)) = split_once_top_level(inner, '|') else {
            return fail("mark(…) needs 'GROUP| w1; w2; …'");
        };
        let group = parse(group.trim())?;
        let words = words
            .split(';')
            .map(|w| ReducedWord::parse(w, group.rank()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(GroupError::from)?;
        return Ok(group.remark(&words)?);
    }
    let Some((kind, arguments)) = spec.split_once(':') else {
        return fail("expected KIND:PARAMETERS");
    };
    let numbers: Vec<u64> = match arguments
        .split(',')
        .map(|a| a.trim().parse::<u64>())
        .collect::<Result<_, _>>()
    {
        Ok(numbers) => numbers,
        Err(_) => return fail("parameters must be nonnegative integers"),
    };
    let single = || match numbers.as_slice() {
        [n] => Ok(*n),
        _ => fail(format!("{kind} takes exactly one parameter")),
    };
    let group = match kind.trim() {
        "zr" => MarkedGroup::abelian(single()? as usize, None)?,
        "tm" => MarkedGroup::abelian(numbers.len(), Some(&numbers))?,
        "ll" => MarkedGroup::lamplighter(single()?)?,
        "bs" => MarkedGroup::baumslag_solitar(single()?)?,
        "sdr" => match numbers.as_slice() {
            [depth, rank] => MarkedGroup::free_solvable(*depth as usize, *rank as usize)?,
            _ => return fail("sdr takes depth and rank"),
        },
        other => return fail(format!("unknown group kind '{other}'")),
    };
    Ok(group)
}

fn strip_call<'a>(spec: &'a str, name: &str) -> Option<&'a str> {
    spec.strip_prefix(name)?
        .trim_start()
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn split_top_level(text: &str, separator: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (position, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == separator && depth == 0 => {
                parts.push(&text[start..position]);
                start = position + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

fn split_once_top_level(text: &str, separator: char) -> Option<(&str, &str)> {
    let parts = split_top_level(text, separator);
    (parts.len() >= 2).then(|| {
        let first = parts[0];
        (first, &text[first.len() + separator.len_utf8()..])
    })
}
