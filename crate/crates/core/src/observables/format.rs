use num_complex::Complex;
use serde_json::{json, Value};

use super::step::StepFunction;
use crate::error::{Error, Result};
use crate::numeric::{format_float, Real};

/// `{"breakpoints":["0","1/8",...],"values":[[re,im],...]}`.
pub fn step_to_json<R: Real>(f: &StepFunction<R>) -> Value {
    json!({
        "breakpoints": f.breakpoints().iter().map(Real::to_json).collect::<Vec<_>>(),
        "values": f.values().iter().map(|v| json!([v.re.to_json(), v.im.to_json()])).collect::<Vec<_>>(),
    })
}

pub fn step_from_json<R: Real>(v: &Value) -> Result<StepFunction<R>> {
    let bad = |m: &str| Error::Validation(format!("bad step function JSON: {m}"));
    let bps = v
        .get("breakpoints")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing breakpoints"))?
        .iter()
        .map(R::from_json)
        .collect::<Result<Vec<R>>>()?;
    let vals = v
        .get("values")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing values"))?
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([re, im]) => Ok(Complex::new(R::from_json(re)?, R::from_json(im)?)),
            _ => Err(bad("each value must be [re, im]")),
        })
        .collect::<Result<Vec<_>>>()?;
    StepFunction::new(bps, vals)
}

/// CSV with header `piece_lo,piece_hi,re,im`.
pub fn step_to_csv<R: Real>(f: &StepFunction<R>) -> String {
    let mut out = String::from("piece_lo,piece_hi,re,im\n");
    for (lo, hi, v) in f.pieces() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_float(lo.to_f64()),
            format_float(hi.to_f64()),
            format_float(v.re.to_f64()),
            format_float(v.im.to_f64())
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, Rational};

    #[test]
    fn json_round_trip() {
        let f = StepFunction::<Rational>::new(
            vec![rat(0, 1), rat(1, 8), rat(1, 1)],
            vec![Complex::new(rat(8, 1), rat(0, 1)), Complex::new(rat(-1, 3), rat(2, 5))],
        )
        .unwrap();
        let v = step_to_json(&f);
        assert_eq!(v["breakpoints"][1], "1/8");
        assert_eq!(step_from_json::<Rational>(&v).unwrap(), f);
        let g: StepFunction<f64> = step_from_json(&v).unwrap();
        assert_eq!(g.breakpoints()[1], 0.125);
        let text = r#"{"breakpoints":["0","1/2",1],"values":[[1,0],[-1,0]]}"#;
        let h: StepFunction<Rational> = step_from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(h.piece_count(), 2);
        assert!(step_from_json::<Rational>(&json!({"breakpoints":["0","1"]})).is_err());
    }

    #[test]
    fn csv_rows() {
        let f = StepFunction::<f64>::indicator(0.0, 0.5).unwrap();
        let csv = step_to_csv(&f);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0.0000000000000000e0,5.0000000000000000e-1,1.0000000000000000e0,0.0000000000000000e0");
    }
}
