//! Angle literals: decimals (`2.5`) and rational multiples of pi (`pi`,
//! `-pi/2`, `3pi/4`, `3*pi/4`, `0.75pi`), optionally repeated with `xN`.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};

/// Parses one angle literal.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim();
    if s.is_empty() {
        bail!("empty angle literal");
    }
    let Some(pos) = s.find("pi") else {
        let value: f64 = s.parse().with_context(|| format!("invalid angle literal {text:?}"))?;
        return finite(value, text);
    };
    let (head, tail) = (&s[..pos], &s[pos + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head).trim();
    let coefficient = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().with_context(|| format!("invalid coefficient in angle literal {text:?}"))?,
    };
    let tail = tail.trim();
    let value = if tail.is_empty() {
        coefficient * PI
    } else if let Some(denominator) = tail.strip_prefix('/') {
        let d: f64 = denominator.trim().parse().with_context(|| format!("invalid denominator in angle literal {text:?}"))?;
        if d == 0.0 {
            bail!("zero denominator in angle literal {text:?}");
        }
        coefficient * PI / d
    } else {
        bail!("unexpected {tail:?} in angle literal {text:?}");
    };
    finite(value, text)
}

fn finite(value: f64, text: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        bail!("angle literal {text:?} is not finite")
    }
}

fn parse_repeat(token: &str) -> Option<Result<usize>> {
    let count = token.strip_prefix('x').or_else(|| token.strip_prefix('*'))?;
    Some(
        count
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("invalid repeat count {token:?}")),
    )
}

/// Parses a list of angles separated by commas or whitespace. A token `xN`
/// (or a literal suffix `xN`, as in `3pi/4x4`) repeats the preceding angle
/// `N` times in total.
pub fn parse_angle_list<S: AsRef<str>>(tokens: &[S]) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::new();
    let joined = tokens.iter().map(|t| t.as_ref()).collect::<Vec<_>>().join(" ");
    for token in joined.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        if let Some(count) = parse_repeat(token) {
            let count = count?;
            let last = *out.last().with_context(|| format!("repeat {token:?} has no angle before it"))?;
            out.extend(std::iter::repeat_n(last, count - 1));
            continue;
        }
        match token.rfind('x') {
            Some(i) if i > 0 => {
                let angle = parse_angle(&token[..i])?;
                let count = parse_repeat(&token[i..]).expect("starts with x")?;
                out.extend(std::iter::repeat_n(angle, count));
            }
            _ => out.push(parse_angle(token)?),
        }
    }
    if out.is_empty() {
        bail!("no angles given");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_expressions_are_exact() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 0.75 * PI);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 0.75 * PI);
        assert_eq!(parse_angle("23pi/24").unwrap(), 23.0 * PI / 24.0);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("2.5").unwrap(), 2.5);
    }

    #[test]
    fn malformed_literals_are_rejected() {
        for bad in ["", "p", "3pi/0", "pi/x", "3pie", "abc", "inf"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn lists_expand_repeats() {
        assert_eq!(parse_angle_list(&["3pi/4", "x4"]).unwrap(), vec![0.75 * PI; 4]);
        assert_eq!(parse_angle_list(&["3pi/4x4"]).unwrap(), vec![0.75 * PI; 4]);
        assert_eq!(parse_angle_list(&["1,2", "pi"]).unwrap(), vec![1.0, 2.0, PI]);
        assert!(parse_angle_list(&["x2"]).is_err());
        assert!(parse_angle_list(&["1", "x0"]).is_err());
        assert!(parse_angle_list::<&str>(&[]).is_err());
    }
}
