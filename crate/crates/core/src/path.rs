//! Cadlag sample paths on a finite time grid.

use std::io::{BufRead, Write};

use crate::error::{Result, SkeError};

/// A cadlag path recorded on a strictly increasing time grid.
///
/// Values are right-continuous: `value_at(t)` returns the value at the
/// last grid point `<= t`.  Exploded paths carry the explosion time and
/// hold signed infinity afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    /// `(time, size)` for every simulated jump above the cutoff, when the
    /// generator was asked to record them.
    pub jumps: Option<Vec<(f64, f64)>>,
    pub exploded: bool,
    pub explosion_time: Option<f64>,
}

impl SamplePath {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() || t.len() < 2 {
            return Err(SkeError::Input(
                "sample path needs matching grids of length >= 2".into(),
            ));
        }
        if t.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(SkeError::Input("sample path grid must be strictly increasing".into()));
        }
        Ok(SamplePath { t, v, jumps: None, exploded: false, explosion_time: None })
    }

    pub fn start_time(&self) -> f64 {
        self.t[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.t.last().unwrap()
    }

    pub fn covers(&self, a: f64, b: f64) -> bool {
        self.start_time() <= a && b <= self.end_time()
    }

    /// Index of the last grid point `<= time`.
    pub fn index_at(&self, time: f64) -> Option<usize> {
        if time < self.t[0] {
            return None;
        }
        Some(match self.t.partition_point(|&x| x <= time) {
            0 => 0,
            k => k - 1,
        })
    }

    /// Cadlag evaluation (step interpolation from the left).
    pub fn value_at(&self, time: f64) -> f64 {
        match self.index_at(time) {
            Some(i) => self.v[i],
            None => self.v[0],
        }
    }

    /// Mark the path absorbed from `time` onward (paper convention: the
    /// path equals infinity after its explosion time).
    pub fn absorb_from(&mut self, time: f64, sign: f64) {
        self.exploded = true;
        self.explosion_time = Some(time);
        let fill = if sign < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
        for (ti, vi) in self.t.iter().zip(self.v.iter_mut()) {
            if *ti >= time {
                *vi = fill;
            }
        }
    }

    /// Sup of `|self - other|` over the shared grid, ignoring non-finite
    /// entries.
    pub fn sup_abs_diff(&self, other: &SamplePath) -> f64 {
        self.v
            .iter()
            .zip(&other.v)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Serialize in the `time,value,is_jump` CSV layout.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "time,value,is_jump")?;
        let jump_times: Vec<f64> =
            self.jumps.as_ref().map(|j| j.iter().map(|(t, _)| *t).collect()).unwrap_or_default();
        let mut ji = 0usize;
        for (ti, vi) in self.t.iter().zip(&self.v) {
            while ji < jump_times.len() && jump_times[ji] < *ti {
                ji += 1;
            }
            let is_jump = ji < jump_times.len() && jump_times[ji] == *ti;
            writeln!(out, "{ti},{vi},{}", if is_jump { 1 } else { 0 })?;
        }
        Ok(())
    }

    /// Parse the `time,value,is_jump` CSV layout.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut t = Vec::new();
        let mut v = Vec::new();
        let mut jumps = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| SkeError::Input(format!("read error: {e}")))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if lineno == 0 && line.starts_with("time") {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(SkeError::Input(format!(
                    "path CSV line {}: expected time,value,is_jump",
                    lineno + 1
                )));
            }
            let ti: f64 = parts[0]
                .parse()
                .map_err(|_| SkeError::Input(format!("path CSV line {}: bad time", lineno + 1)))?;
            let vi: f64 = parts[1]
                .parse()
                .map_err(|_| SkeError::Input(format!("path CSV line {}: bad value", lineno + 1)))?;
            let flag: u8 = parts[2].trim().parse().map_err(|_| {
                SkeError::Input(format!("path CSV line {}: bad is_jump flag", lineno + 1))
            })?;
            if flag == 1 {
                let prev = v.last().copied().unwrap_or(vi);
                jumps.push((ti, vi - prev));
            }
            t.push(ti);
            v.push(vi);
        }
        let mut path = SamplePath::new(t, v)?;
        path.jumps = Some(jumps);
        Ok(path)
    }
}
