//! Tidy result tables and their CSV form.

use std::io::Write;
use std::path::Path;

use crate::config::Mu;
use crate::error::{CliError, CliResult};

/// Version of the column layout below; bump on any change.
pub const SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 10] = ["engine", "quantity", "sample", "l", "d", "mu", "t", "lambda", "value", "stderr"];

/// Seventeen significant digits in exponent form.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x == 0.0 {
        "0.0000000000000000e0".into()
    } else {
        format!("{x:.16e}")
    }
}

/// One observation. Unused coordinates stay empty in the CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub engine: String,
    pub quantity: String,
    pub sample: Option<u64>,
    pub l: Option<usize>,
    pub d: Option<f64>,
    pub mu: Option<Mu>,
    pub t: Option<u64>,
    pub lambda: Option<f64>,
    pub value: f64,
    pub stderr: Option<f64>,
}

impl Row {
    pub fn new(engine: &str, quantity: &str, value: f64) -> Self {
        Row {
            engine: engine.into(),
            quantity: quantity.into(),
            sample: None,
            l: None,
            d: None,
            mu: None,
            t: None,
            lambda: None,
            value,
            stderr: None,
        }
    }

    pub fn sample(mut self, s: u64) -> Self {
        self.sample = Some(s);
        self
    }
    pub fn l(mut self, l: usize) -> Self {
        self.l = Some(l);
        self
    }
    pub fn d(mut self, d: f64) -> Self {
        self.d = Some(d);
        self
    }
    pub fn mu(mut self, mu: Mu) -> Self {
        self.mu = Some(mu);
        self
    }
    pub fn t(mut self, t: usize) -> Self {
        self.t = Some(t as u64);
        self
    }
    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }
    pub fn stderr(mut self, se: f64) -> Self {
        self.stderr = Some(se);
        self
    }

    fn fields(&self) -> [String; 10] {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        [
            self.engine.clone(),
            self.quantity.clone(),
            self.sample.map(|s| s.to_string()).unwrap_or_default(),
            self.l.map(|s| s.to_string()).unwrap_or_default(),
            opt(self.d),
            self.mu.map(Mu::label).unwrap_or_default(),
            self.t.map(|s| s.to_string()).unwrap_or_default(),
            opt(self.lambda),
            fmt_f64(self.value),
            opt(self.stderr),
        ]
    }
}

/// Rows in emission order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new() -> Self {
        Table::default()
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Table) {
        self.rows.extend(other.rows);
    }

    /// Rows with the given quantity name.
    pub fn select<'a>(&'a self, quantity: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.quantity == quantity)
    }

    pub fn to_csv_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(COLUMNS)?;
        for r in &self.rows {
            w.write_record(r.fields())?;
        }
        w.flush().map_err(|e| CliError::io("<memory>", e))?;
        w.into_inner().map_err(|e| CliError::io("<memory>", e.into_error()))
    }

    pub fn write_csv(&self, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = self.to_csv_bytes()?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        f.write_all(&bytes).map_err(|e| CliError::io(path, e))?;
        Ok(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(-0.0), fmt_f64(0.0));
        for x in [0.1, 1.0 / 3.0, -7.25e-300, 6.02e23] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    proptest::proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            proptest::prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn empty_cells_for_unused_coordinates() {
        let mut t = Table::new();
        t.push(Row::new("analytic", "c1", 0.5).t(4).mu(Mu::INF));
        let text = String::from_utf8(t.to_csv_bytes().unwrap()).unwrap();
        assert_eq!(
            text,
            "engine,quantity,sample,l,d,mu,t,lambda,value,stderr\nanalytic,c1,,,,inf,4,,5.0000000000000000e-1,\n"
        );
    }
}
