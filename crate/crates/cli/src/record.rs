//! Result records and number formatting.

use std::collections::BTreeMap;

use serde::Serialize;

/// Rounds to 12 significant digits so that output files are stable.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

pub fn fmt12(x: f64) -> String {
    format!("{}", round12(x))
}

#[derive(Clone, Debug, Serialize)]
pub struct CarrierOut {
    pub k: usize,
    pub vector: Vec<u64>,
    pub point: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleOut {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub max_diff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultRecord {
    pub version: &'static str,
    pub command: String,
    pub spec_hash: String,
    pub k_range: [usize; 2],
    pub engine: String,
    pub values: Vec<f64>,
    pub carriers: Vec<CarrierOut>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl ResultRecord {
    /// Applies [`round12`] to every float.
    pub fn rounded(mut self) -> Self {
        let r = |v: &mut Vec<f64>| v.iter_mut().for_each(|x| *x = round12(*x));
        r(&mut self.values);
        for c in &mut self.carriers {
            r(&mut c.point);
        }
        if let Some(w) = &mut self.weights {
            r(w);
        }
        if let Some(o) = &mut self.oracle {
            r(&mut o.values);
            r(&mut o.errors);
            o.max_diff = round12(o.max_diff);
        }
        self.wall_time_s = self.wall_time_s.map(round12);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serialises");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let join_u = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        let join_f = |v: &[f64]| v.iter().map(|x| fmt12(*x)).collect::<Vec<_>>().join(";");
        let mut out = String::from("k,value,carrier_vector,carrier_point\n");
        for (c, v) in self.carriers.iter().zip(&self.values) {
            out.push_str(&format!("{},{},{},{}\n", c.k, fmt12(*v), join_u(&c.vector), join_f(&c.point)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(std::f64::consts::PI), 3.14159265359);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(fmt12(123.0), "123");
        assert_eq!(round12(-2.5e-20), -2.5e-20);
    }
}
