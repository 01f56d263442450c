//! Parsing of `--nop` and `--eps` ranges.

use anyhow::{bail, Context, Result};

/// `"15"` or an inclusive range `"1..60"`.
pub fn nop_values(spec: &str) -> Result<Vec<u32>> {
    let parse = |s: &str| s.trim().parse::<u32>().with_context(|| format!("bad nop value {s:?}"));
    let (lo, hi) = match spec.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(spec)?;
            (v, v)
        }
    };
    if lo == 0 {
        bail!("nop must be at least 1");
    }
    if hi < lo {
        bail!("empty nop range {spec:?}");
    }
    Ok((lo..=hi).collect())
}

/// `"0.002"` or `"start:stop:step"`, stop included when hit exactly.
pub fn eps_values(spec: &str) -> Result<Vec<f64>> {
    let parse = |s: &str| s.trim().parse::<f64>().with_context(|| format!("bad epsilon {s:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [v] => vec![parse(v)?],
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if !(step > 0.0) || stop < start {
                bail!("epsilon range {spec:?} needs step > 0 and stop >= start");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| start + step * i as f64).collect()
        }
        _ => bail!("epsilon must be a value or start:stop:step, got {spec:?}"),
    };
    if let Some(e) = values.iter().find(|e| !(**e > 0.0 && **e < 0.75)) {
        bail!("epsilon {e} outside (0, 0.75)");
    }
    Ok(values)
}

/// Counts such as `"1e7"` or `"10000000"`.
pub fn count(spec: &str) -> Result<u64> {
    if let Ok(n) = spec.parse::<u64>() {
        return Ok(n);
    }
    let v: f64 = spec.parse().with_context(|| format!("bad count {spec:?}"))?;
    if !(v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
        bail!("count {spec:?} is not a nonnegative integer");
    }
    Ok(v as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nop_ranges() {
        assert_eq!(nop_values("15").unwrap(), vec![15]);
        assert_eq!(nop_values("1..60").unwrap().len(), 60);
        assert_eq!(nop_values("3..=5").unwrap(), vec![3, 4, 5]);
        assert!(nop_values("0..5").is_err());
        assert!(nop_values("5..3").is_err());
        assert!(nop_values("x").is_err());
    }

    #[test]
    fn eps_ranges() {
        assert_eq!(eps_values("0.002").unwrap(), vec![0.002]);
        let v = eps_values("0.0002:0.012:0.0002").unwrap();
        assert_eq!(v.len(), 60);
        assert!((v[59] - 0.012).abs() < 1e-12);
        assert!(eps_values("0:0.01:0.001").is_err());
        assert!(eps_values("0.1:0.01:0.001").is_err());
        assert!(eps_values("0.001:0.01").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(count("1e7").unwrap(), 10_000_000);
        assert_eq!(count("250").unwrap(), 250);
        assert!(count("1.5").is_err());
        assert!(count("-3").is_err());
    }
}
