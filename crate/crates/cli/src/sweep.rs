//! Sweep requests and their CSV rendering.

use std::fmt;
use std::io::Write;

use fracsample::binary::{and_dr, and_rd, xor_dr, xor_rd};
use fracsample::combiner::builder_for;
use fracsample::gaussian::{identity_dr, identity_rd, sum_dr, sum_rd, GaussianSumSolution};
use fracsample::model::{Computation, DsbsModel, GaussianPair, SamplingBudget};
use fracsample::multihop::{decoder_cut_bound, multihop_upper_bound, sideinfo_lower_bound, MultiHopRates};
use fracsample::scenario::Scenario;
use fracsample::worstcase::dmu_budget;
use fracsample::Error;

/// Significant digits of every floating-point CSV field.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Upper limit on the number of sweep points in one request.
pub const MAX_POINTS: usize = 1_000_000;

pub const HEADER: [&str; 12] = [
    "scenario",
    "theta1",
    "theta2",
    "rho_or_p",
    "sweep_var",
    "sweep_value",
    "distortion",
    "rate",
    "theta12_star",
    "aux1",
    "aux2",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Rate,
    Distortion,
    R2,
    Mu,
}

impl SweepVar {
    pub fn tag(&self) -> &'static str {
        match self {
            SweepVar::Rate => "rate",
            SweepVar::Distortion => "distortion",
            SweepVar::R2 => "r2",
            SweepVar::Mu => "mu",
        }
    }
}

/// A request that failed validation or hit an unusable parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub scenario: Scenario,
    pub theta1: f64,
    pub theta2: f64,
    pub rho: Option<f64>,
    pub p: Option<f64>,
    pub sweep: SweepVar,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub r1: Option<f64>,
    pub mu: Option<f64>,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Infeasible,
}

impl Status {
    pub fn tag(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Aux {
    Empty,
    Value(f64),
    Tag(&'static str),
}

impl Aux {
    fn render(&self) -> String {
        match self {
            Aux::Empty => String::new(),
            Aux::Value(v) => fmt_sig(*v),
            Aux::Tag(t) => (*t).to_string(),
        }
    }
}

/// One evaluated sweep point. Fields the solver could not produce are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_value: f64,
    pub distortion: Option<f64>,
    pub rate: Option<f64>,
    pub theta12_star: Option<f64>,
    pub aux1: Aux,
    pub aux2: Aux,
    pub status: Status,
}

impl Row {
    fn ok(sweep_value: f64, distortion: f64, rate: f64, theta12_star: f64, aux1: Aux, aux2: Aux) -> Self {
        Row {
            sweep_value,
            distortion: Some(distortion),
            rate: Some(rate),
            theta12_star: Some(theta12_star),
            aux1,
            aux2,
            status: Status::Ok,
        }
    }

    fn infeasible(distortion: f64) -> Self {
        Row {
            sweep_value: distortion,
            distortion: Some(distortion),
            rate: None,
            theta12_star: None,
            aux1: Aux::Empty,
            aux2: Aux::Empty,
            status: Status::Infeasible,
        }
    }
}

fn allowed_sweeps(scenario: Scenario) -> &'static [SweepVar] {
    match scenario {
        Scenario::GaussianIdentity | Scenario::GaussianSum | Scenario::BinaryXor | Scenario::BinaryAnd => {
            &[SweepVar::Rate, SweepVar::Distortion]
        }
        Scenario::Multihop => &[SweepVar::R2],
        Scenario::Worstcase => &[SweepVar::Mu, SweepVar::Rate],
    }
}

impl SweepRequest {
    /// Model parameter echoed in the `rho_or_p` column.
    pub fn model_param(&self) -> f64 {
        self.rho.or(self.p).unwrap_or(f64::NAN)
    }

    /// Checks flag combinations and parameter domains without solving.
    pub fn validate(&self) -> Result<(), UsageError> {
        let sc = self.scenario;
        SamplingBudget::new(self.theta1, self.theta2)?;
        if sc.is_binary() {
            if self.rho.is_some() {
                return Err(usage(format!("--rho does not apply to {sc}; use --p")));
            }
            let p = self.p.ok_or_else(|| usage(format!("{sc} requires --p")))?;
            DsbsModel::new(p)?;
            if sc == Scenario::BinaryAnd && p == 0.5 {
                return Err(usage("binary-and is undefined at p = 0.5"));
            }
        } else {
            if self.p.is_some() {
                return Err(usage(format!("--p does not apply to {sc}; use --rho")));
            }
            let rho = self.rho.ok_or_else(|| usage(format!("{sc} requires --rho")))?;
            GaussianPair::new(rho)?;
            let degenerate = match sc {
                Scenario::GaussianSum | Scenario::Worstcase => rho == -1.0,
                Scenario::Multihop => rho.abs() == 1.0,
                _ => false,
            };
            if degenerate {
                return Err(usage(format!("rho = {rho} is degenerate for {sc}")));
            }
        }
        if !allowed_sweeps(sc).contains(&self.sweep) {
            return Err(usage(format!("{sc} cannot sweep {}", self.sweep.tag())));
        }
        let needs_r1 = sc == Scenario::Multihop;
        let needs_rate = sc == Scenario::Worstcase && self.sweep == SweepVar::Mu;
        let needs_mu = sc == Scenario::Worstcase && self.sweep == SweepVar::Rate;
        for (name, value, needed) in [("--r1", self.r1, needs_r1), ("--rate", self.rate, needs_rate), ("--mu", self.mu, needs_mu)] {
            match (value, needed) {
                (None, true) => return Err(usage(format!("{sc} sweeping {} requires {name}", self.sweep.tag()))),
                (Some(_), false) => {
                    return Err(usage(format!("{name} does not apply to {sc} sweeping {}", self.sweep.tag())))
                }
                (Some(v), true) if !(v >= 0.0 && v.is_finite()) => {
                    return Err(usage(format!("{name} must be finite and nonnegative, got {v}")))
                }
                _ => {}
            }
        }
        self.points().map(|_| ())
    }

    /// Sweep values `from + i * step` up to `to`.
    pub fn points(&self) -> Result<Vec<f64>, UsageError> {
        let (from, to, step) = (self.from, self.to, self.step);
        if !(from.is_finite() && to.is_finite() && step.is_finite()) {
            return Err(usage("sweep range must be finite"));
        }
        if !(step > 0.0) {
            return Err(usage(format!("--step must be positive, got {step}")));
        }
        if to < from {
            return Err(usage(format!("empty sweep range [{from}, {to}]")));
        }
        if from < 0.0 {
            return Err(usage(format!("sweep values must be nonnegative, got --from {from}")));
        }
        let count = ((to - from) / step + 1e-9).floor() + 1.0;
        if count > MAX_POINTS as f64 {
            return Err(usage(format!("sweep has {count} points, limit is {MAX_POINTS}")));
        }
        Ok((0..count as usize).map(|i| from + i as f64 * step).collect())
    }

    /// Evaluates every sweep point in order.
    pub fn run(&self) -> Result<Vec<Row>, UsageError> {
        self.validate()?;
        self.points()?.into_iter().map(|x| self.evaluate(x)).collect()
    }

    fn evaluate(&self, x: f64) -> Result<Row, UsageError> {
        let budget = SamplingBudget::new(self.theta1, self.theta2)?;
        let param = self.model_param();
        let row = match (self.scenario, self.sweep) {
            (Scenario::GaussianIdentity, SweepVar::Rate) => {
                let s = identity_dr(&budget, param, x)?;
                Row::ok(x, s.distortion, x, s.theta12_star, Aux::Value(s.r2_star), Aux::Empty)
            }
            (Scenario::GaussianIdentity, SweepVar::Distortion) => match identity_rd(&budget, param, x) {
                Ok((rate, s)) => Row::ok(x, x, rate, s.theta12_star, Aux::Value(s.r2_star), Aux::Empty),
                Err(Error::InfeasibleDistortion { .. }) => Row::infeasible(x),
                Err(e) => return Err(e.into()),
            },
            (Scenario::GaussianSum, SweepVar::Rate) => sum_row(x, x, sum_dr(&budget, param, x)?),
            (Scenario::GaussianSum, SweepVar::Distortion) => match sum_rd(&budget, param, x) {
                Ok((rate, s)) => sum_row(x, rate, GaussianSumSolution { distortion: x, ..s }),
                Err(Error::InfeasibleDistortion { .. }) => Row::infeasible(x),
                Err(e) => return Err(e.into()),
            },
            (Scenario::BinaryXor, SweepVar::Rate) => {
                let (d, t) = xor_dr(&budget, param, x)?;
                Row::ok(x, d, x, t, Aux::Empty, Aux::Empty)
            }
            (Scenario::BinaryXor, SweepVar::Distortion) => match xor_rd(&budget, param, x) {
                Ok((rate, t)) => Row::ok(x, x, rate, t, Aux::Empty, Aux::Empty),
                Err(Error::InfeasibleDistortion { .. }) => Row::infeasible(x),
                Err(e) => return Err(e.into()),
            },
            (Scenario::BinaryAnd, SweepVar::Rate) => {
                let (d, s) = and_dr(&budget, param, x)?;
                Row::ok(x, d, x, s.theta12_star, Aux::Value(s.d12_star), Aux::Value(s.d3_star))
            }
            (Scenario::BinaryAnd, SweepVar::Distortion) => match and_rd(&budget, param, x) {
                Ok(s) => Row::ok(x, x, s.rate, s.theta12_star, Aux::Value(s.d12_star), Aux::Value(s.d3_star)),
                Err(Error::InfeasibleDistortion { .. }) => Row::infeasible(x),
                Err(e) => return Err(e.into()),
            },
            (Scenario::Multihop, SweepVar::R2) => {
                let r1 = self.r1.unwrap_or_default();
                let upper = multihop_upper_bound(MultiHopRates::new(r1, x)?, &budget, param)?;
                let side = sideinfo_lower_bound(r1, &budget, param)?;
                let cut = decoder_cut_bound(x, &budget, param)?;
                Row::ok(x, upper.distortion, r1, upper.theta12_star, Aux::Value(side.distortion), Aux::Value(cut))
            }
            (Scenario::Worstcase, SweepVar::Mu) => {
                let rate = self.rate.unwrap_or_default();
                let opt = dmu_budget(&budget, rate, x, builder_for(self.gaussian_sum()?, budget))?;
                Row::ok(x, opt.distortion, rate, opt.theta12_star, Aux::Value(opt.interior), Aux::Value(opt.boundary))
            }
            (Scenario::Worstcase, SweepVar::Rate) => {
                let mu = self.mu.unwrap_or_default();
                let opt = dmu_budget(&budget, x, mu, builder_for(self.gaussian_sum()?, budget))?;
                let winner = if opt.distortion == opt.interior { "interior" } else { "boundary" };
                Row::ok(x, opt.distortion, x, opt.theta12_star, Aux::Value(mu), Aux::Tag(winner))
            }
            (sc, var) => return Err(usage(format!("{sc} cannot sweep {}", var.tag()))),
        };
        Ok(row)
    }

    fn gaussian_sum(&self) -> Result<Computation, UsageError> {
        Ok(Computation::GaussianSum(GaussianPair::new(self.model_param())?))
    }
}

fn sum_row(x: f64, rate: f64, s: GaussianSumSolution) -> Row {
    Row::ok(x, s.distortion, rate, s.theta12_star, Aux::Value(s.r12_star), Aux::Tag(s.branch.tag()))
}

/// Formats like C's `%.9g`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_sig(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Writes the header and one record per row.
pub fn write_csv<W: Write>(request: &SweepRequest, rows: &[Row], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let echo = [
        request.scenario.tag().to_string(),
        fmt_sig(request.theta1),
        fmt_sig(request.theta2),
        fmt_sig(request.model_param()),
        request.sweep.tag().to_string(),
    ];
    for row in rows {
        let mut record = echo.to_vec();
        record.extend([
            fmt_sig(row.sweep_value),
            opt_sig(row.distortion),
            opt_sig(row.rate),
            opt_sig(row.theta12_star),
            row.aux1.render(),
            row.aux2.render(),
            row.status.tag().to_string(),
        ]);
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(scenario: Scenario, sweep: SweepVar) -> SweepRequest {
        SweepRequest {
            scenario,
            theta1: 0.5,
            theta2: 0.75,
            rho: Some(0.5),
            p: None,
            sweep,
            from: 0.0,
            to: 1.0,
            step: 0.25,
            r1: None,
            mu: None,
            rate: None,
        }
    }

    #[test]
    fn formats_like_printf_g() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig(0.5625), "0.5625");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig(123456789.0), "123456789");
        assert_eq!(fmt_sig(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_sig(1.5e-5), "1.5e-05");
        assert_eq!(fmt_sig(0.0001), "0.0001");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(0.9999999999), "1");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
    }

    #[test]
    fn points_are_offsets_from_start() {
        let mut r = request(Scenario::GaussianSum, SweepVar::Rate);
        r.from = 0.0;
        r.to = 0.3;
        r.step = 0.1;
        assert_eq!(r.points().unwrap().len(), 4);
        r.to = 0.0;
        assert_eq!(r.points().unwrap(), vec![0.0]);
        r.step = 0.0;
        assert!(r.points().is_err());
        r.step = 0.1;
        r.to = -0.1;
        assert!(r.points().is_err());
    }

    #[test]
    fn flag_combinations_are_checked() {
        let r = request(Scenario::GaussianSum, SweepVar::Rate);
        assert!(r.validate().is_ok());
        assert!(SweepRequest { rho: None, p: Some(0.2), ..r.clone() }.validate().is_err());
        assert!(SweepRequest { sweep: SweepVar::Mu, ..r.clone() }.validate().is_err());
        assert!(SweepRequest { r1: Some(0.3), ..r.clone() }.validate().is_err());
        assert!(SweepRequest { rho: Some(-1.0), ..r.clone() }.validate().is_err());
        assert!(SweepRequest { theta1: 1.5, ..r.clone() }.validate().is_err());
        let m = request(Scenario::Multihop, SweepVar::R2);
        assert!(m.validate().is_err());
        assert!(SweepRequest { r1: Some(0.3), ..m }.validate().is_ok());
        let w = request(Scenario::Worstcase, SweepVar::Mu);
        assert!(w.validate().is_err());
        assert!(SweepRequest { rate: Some(0.3), ..w.clone() }.validate().is_ok());
        assert!(SweepRequest { sweep: SweepVar::Rate, mu: Some(0.1), ..w }.validate().is_ok());
        let a = SweepRequest { rho: None, p: Some(0.5), ..request(Scenario::BinaryAnd, SweepVar::Rate) };
        assert!(a.validate().is_err());
    }

    #[test]
    fn infeasible_targets_become_rows() {
        let r = SweepRequest {
            rho: None,
            p: Some(0.2),
            from: 0.0,
            to: 0.2,
            step: 0.1,
            ..request(Scenario::BinaryXor, SweepVar::Distortion)
        };
        let rows = r.run().unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].status, Status::Infeasible);
        assert_eq!(rows[0].rate, None);
        assert_eq!(rows[2].status, Status::Ok);
    }

    #[test]
    fn csv_echoes_inputs() {
        let r = SweepRequest { to: 0.5, ..request(Scenario::GaussianSum, SweepVar::Rate) };
        let rows = r.run().unwrap();
        let mut buf = Vec::new();
        write_csv(&r, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], HEADER.join(","));
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("gaussian-sum,0.5,0.75,0.5,rate,0,3,0,0.5,0,small-rate,ok"));
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), HEADER.len());
        }
    }
}
