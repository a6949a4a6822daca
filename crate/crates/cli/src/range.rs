//! Parameter lists given as `a,b,c` or `start:stop:step`.

use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamRange(pub Vec<f64>);

impl ParamRange {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl FromStr for ParamRange {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self(Vec::new()));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Validation(format!("not a number: {t:?}")))
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, step] = parts[..] else {
                return Err(CliError::Validation(format!(
                    "range {s:?} is not start:stop:step"
                )));
            };
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err(CliError::Validation(format!(
                    "range step must be positive, got {step}"
                )));
            }
            // inclusive of stop up to rounding
            let n = ((stop - start) / step + 1e-9).floor();
            let out = if n < 0.0 {
                Vec::new()
            } else {
                (0..=n as usize).map(|i| start + i as f64 * step).collect()
            };
            return Ok(Self(out));
        }
        s.split(',').map(num).collect::<Result<_, _>>().map(Self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(
            "0.5, 1,2".parse::<ParamRange>().unwrap().0,
            vec![0.5, 1.0, 2.0]
        );
        let r = "0.1:0.3:0.1".parse::<ParamRange>().unwrap().0;
        assert_eq!(r.len(), 3);
        assert!((r[2] - 0.3).abs() < 1e-15);
        assert!("1:0:0.1".parse::<ParamRange>().unwrap().0.is_empty());
        assert!("".parse::<ParamRange>().unwrap().0.is_empty());
        assert!("1:2".parse::<ParamRange>().is_err());
        assert!("0:1:0".parse::<ParamRange>().is_err());
        assert!("a,b".parse::<ParamRange>().is_err());
    }
}
