//! Argument value parsers.

use num_complex::Complex64;

/// `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`; exponents like `1e-3+2e+1i` are fine.
pub fn complex(text: &str) -> Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty number".into());
    }
    let number = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number '{s}' in '{text}'"));
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(number(&t)?, 0.0));
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (number(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => number(s)?,
    };
    let z = Complex64::new(re, im);
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("non-finite value '{text}'"))
    }
}

/// Comma-separated complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexList(pub Vec<Complex64>);

pub fn complex_list(text: &str) -> Result<ComplexList, String> {
    text.split(',').map(complex).collect::<Result<_, _>>().map(ComplexList)
}
