//! Line-oriented helpers shared by the text formats.

use crate::error::{Error, Result};

/// Non-empty lines with `#` comments stripped, paired with 1-based numbers.
pub(crate) fn lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines().enumerate().filter_map(|(i, l)| {
        let l = match l.find('#') {
            Some(p) => &l[..p],
            None => l,
        }
        .trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Splits `key: rest` declarations.
pub(crate) fn declaration(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once(':')?;
    let k = k.trim();
    if k.is_empty() || k.contains(char::is_whitespace) {
        return None;
    }
    Some((k, v.trim()))
}

pub(crate) fn expect_tokens<'a>(
    line_no: usize,
    rest: &'a str,
    n: usize,
    what: &str,
) -> Result<Vec<&'a str>> {
    let toks: Vec<&str> = rest.split_whitespace().collect();
    if toks.len() != n {
        return Err(Error::parse(
            line_no,
            format!("{what} expects {n} tokens, found {}", toks.len()),
        ));
    }
    Ok(toks)
}
