//! Twirl sweeps written as CSV.

use ceqec_core::analysis::{logical_gain, twirl_mixture};

use crate::error::{Error, Result};

pub const TWIRL_CSV_HEADER: &str = "lambda,p,theta,q0,q1,q2,q3,R,gain_t1";

/// `axis=start:stop:count`, with `count` evenly spaced points including
/// both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: Axis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Lambda,
    P,
    Theta,
}

impl std::str::FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (axis, range) = s.split_once('=').ok_or("expected AXIS=START:STOP:COUNT")?;
        let axis = match axis {
            "lambda" => Axis::Lambda,
            "p" => Axis::P,
            "theta" => Axis::Theta,
            other => return Err(format!("unknown axis `{other}` (lambda, p, theta)")),
        };
        let parts: Vec<&str> = range.split(':').collect();
        let [a, b, n] = parts[..] else { return Err("expected START:STOP:COUNT".into()) };
        let a: f64 = a.parse().map_err(|_| format!("bad start `{a}`"))?;
        let b: f64 = b.parse().map_err(|_| format!("bad stop `{b}`"))?;
        let n: usize = n.parse().ok().filter(|&n| n >= 1).ok_or(format!("bad count `{n}`"))?;
        let values = if n == 1 { vec![a] } else { (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect() };
        Ok(Self { axis, values })
    }
}

fn fmt(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        x.to_string()
    }
}

pub fn row(lambda: f64, p: f64, theta: f64) -> Result<String> {
    let t = twirl_mixture(lambda, p, theta)?;
    let gain = if t.r.is_infinite() { f64::INFINITY } else { logical_gain(t.r, 1).unwrap_or(0.0) };
    Ok(format!(
        "{lambda},{p},{theta},{},{},{},{},{},{}",
        t.q[0],
        t.q[1],
        t.q[2],
        t.q[3],
        fmt(t.r),
        fmt(gain)
    ))
}

/// Rows for the product of the base point with every sweep, in
/// lambda-major order.
pub fn sweep_csv(base: (f64, f64, f64), sweeps: &[Sweep]) -> Result<String> {
    let mut axes = [vec![base.0], vec![base.1], vec![base.2]];
    for s in sweeps {
        let slot = match s.axis {
            Axis::Lambda => 0,
            Axis::P => 1,
            Axis::Theta => 2,
        };
        axes[slot] = s.values.clone();
    }
    let mut out = String::from(TWIRL_CSV_HEADER);
    out.push('\n');
    for &l in &axes[0] {
        for &p in &axes[1] {
            for &th in &axes[2] {
                out.push_str(&row(l, p, th)?);
                out.push('\n');
            }
        }
    }
    Ok(out)
}

pub fn parse_sweeps(items: &[String]) -> Result<Vec<Sweep>> {
    items.iter().map(|s| s.parse().map_err(Error::Usage)).collect()
}
