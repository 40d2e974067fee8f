//! Value lists like `1,2,5`, `1:10` or `0:1:0.25` (inclusive, step
//! defaults to 1).

use anyhow::{bail, Context, Result};

pub fn parse_usize_list(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .with_context(|| format!("bad integer {s:?} in {spec:?}"))
        };
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b] | [a, b, _] => {
                let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
                let (a, b) = (num(a)?, num(b)?);
                if step == 0 || b < a {
                    bail!("empty range {item:?}");
                }
                out.extend((a..=b).step_by(step));
            }
            _ => bail!("bad range {item:?}"),
        }
    }
    Ok(out)
}

pub fn parse_f64_list(spec: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {s:?} in {spec:?}"))
        };
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if step.is_nan() || step <= 0.0 || b < a {
                    bail!("empty range {item:?}");
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                // Snap to 12 decimals so 0:1:0.1 yields 0.3 rather than 0.30000000000000004.
                out.extend((0..=count).map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12));
            }
            _ => bail!("float range {item:?} needs start:stop:step"),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_lists() {
        assert_eq!(parse_usize_list("1:4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(
            parse_usize_list("2,5,10:30:10").unwrap(),
            vec![2, 5, 10, 20, 30]
        );
        assert!(parse_usize_list("4:1").is_err());
        assert!(parse_usize_list("x").is_err());
    }

    #[test]
    fn float_lists() {
        let v = parse_f64_list("0:1:0.1").unwrap();
        assert_eq!(v.len(), 11);
        assert_eq!(v[3], 0.3);
        assert_eq!(v[10], 1.0);
        assert_eq!(parse_f64_list("0.5,0.6").unwrap(), vec![0.5, 0.6]);
        assert!(parse_f64_list("0:1").is_err());
    }
}
