//! Plain-text `key=value` configuration.
//!
//! One assignment per line, `#` starts a comment, keys are case-sensitive.
//! The case defaults are applied first and every key overrides them.
//!
//! | key | value |
//! |-----|-------|
//! | `case` | `two_stream`, `interpolation_study`, `manufactured_convergence`, `custom` |
//! | `basis` | `fourier`, `legendre`, `hermite` |
//! | `N`, `M` | space and velocity resolution |
//! | `dt`, `t_end` | time step and final time |
//! | `alpha` | Hermite stretch (must be 1 for the other bases) |
//! | `stepper` | `euler` or `bdf2` |
//! | `field_coupling` | `extrapolated` or `frozen` (BDF2 only) |
//! | `cfl_sigma` | CFL exponent on `M` |
//! | `x_min`, `x_max` | periodic space interval |
//! | `v_min`, `v_max` | velocity interval (Fourier and Legendre) |
//! | `diag_every` | diagnostics cadence in steps |
//! | `snapshot_times` | comma-separated list |
//! | `moment_orders` | comma-separated list of `r` |
//! | `interp_alphas` | comma-separated Hermite stretches for the interpolation study |
//! | `out_dir` | output directory |

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::basis::BasisKind;
use crate::config::{CaseKind, SimConfig, VelocityExtent};
use crate::datum::{Forcing, InitialDatum, ManufacturedSolution};
use crate::error::{Error, Result};

const KEYS: &[&str] = &[
    "case",
    "basis",
    "N",
    "M",
    "dt",
    "t_end",
    "alpha",
    "stepper",
    "field_coupling",
    "cfl_sigma",
    "x_min",
    "x_max",
    "v_min",
    "v_max",
    "diag_every",
    "snapshot_times",
    "moment_orders",
    "interp_alphas",
    "out_dir",
];

/// Defaults for a case before any overrides.
pub fn case_defaults(case: CaseKind, basis: BasisKind) -> SimConfig {
    let mut c = SimConfig::two_stream(basis);
    c.case = case;
    match case {
        CaseKind::TwoStream | CaseKind::Custom => {}
        CaseKind::InterpolationStudy => {
            c.t_end = 0.0;
            c.snapshot_times.clear();
        }
        CaseKind::ManufacturedConvergence => {
            c.t_end = 1.0;
            c.dt = 4e-3;
            c.snapshot_times.clear();
            c.diag_every = 1000;
        }
    }
    c
}

/// Datum and forcing implied by the case on the resolved grid.
pub fn attach_case_data(c: &mut SimConfig) {
    match c.case {
        CaseKind::ManufacturedConvergence => {
            let kappa = std::f64::consts::TAU / (c.x_extent.1 - c.x_extent.0);
            let ms = ManufacturedSolution::for_basis(c.basis, c.v_extent, c.alpha, kappa);
            c.datum = InitialDatum::Manufactured(ms);
            c.forcing = Forcing::Manufactured(ms);
        }
        _ => {
            c.datum = InitialDatum::two_stream();
            c.forcing = Forcing::None;
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse::<T>()
        .map_err(|_| parse_err(line, format!("invalid value `{raw}` for `{key}`")))
}

fn list<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| value(line, key, s))
        .collect()
}

/// Parse a configuration document. `case_override` (from the command line)
/// takes precedence over a `case` key.
pub fn parse_config_with(text: &str, case_override: Option<CaseKind>) -> Result<SimConfig> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected `key=value`, got `{line}`")))?;
        let (key, val) = (key.trim(), val.trim());
        if !KEYS.contains(&key) {
            return Err(parse_err(line_no, format!("unknown key `{key}`")));
        }
        if let Some((first, _)) = entries.insert(key, (line_no, val)) {
            return Err(parse_err(line_no, format!("duplicate key `{key}` (first set on line {first})")));
        }
    }

    let get = |k: &str| entries.get(k).copied();
    let case = match (case_override, get("case")) {
        (Some(c), _) => c,
        (None, Some((l, v))) => v.parse().map_err(|e: Error| parse_err(l, e.to_string()))?,
        (None, None) => CaseKind::TwoStream,
    };
    let basis = match get("basis") {
        Some((l, v)) => v.parse().map_err(|e: Error| parse_err(l, e.to_string()))?,
        None => BasisKind::FourierPeriodic,
    };
    let mut c = case_defaults(case, basis);

    for (&key, &(l, v)) in &entries {
        match key {
            "case" | "basis" => {}
            "N" => c.n = value(l, key, v)?,
            "M" => c.m = value(l, key, v)?,
            "dt" => c.dt = value(l, key, v)?,
            "t_end" => c.t_end = value(l, key, v)?,
            "alpha" => c.alpha = value(l, key, v)?,
            "stepper" => c.stepper = v.parse().map_err(|e: Error| parse_err(l, e.to_string()))?,
            "field_coupling" => c.field_coupling = v.parse().map_err(|e: Error| parse_err(l, e.to_string()))?,
            "cfl_sigma" => c.cfl_sigma = Some(value(l, key, v)?),
            "x_min" => c.x_extent.0 = value(l, key, v)?,
            "x_max" => c.x_extent.1 = value(l, key, v)?,
            "v_min" | "v_max" => {
                let x: f64 = value(l, key, v)?;
                let (mut lo, mut hi) = match c.v_extent {
                    VelocityExtent::Finite { lo, hi } => (lo, hi),
                    VelocityExtent::WholeLine => {
                        return Err(parse_err(l, format!("`{key}` does not apply to the {basis} basis")))
                    }
                };
                if key == "v_min" {
                    lo = x;
                } else {
                    hi = x;
                }
                c.v_extent = VelocityExtent::Finite { lo, hi };
            }
            "diag_every" => c.diag_every = value(l, key, v)?,
            "snapshot_times" => c.snapshot_times = list(l, key, v)?,
            "moment_orders" => c.moment_orders = list(l, key, v)?,
            "interp_alphas" => c.interp_alphas = list(l, key, v)?,
            "out_dir" => c.out_dir = PathBuf::from(v),
            _ => unreachable!("key list and match arms disagree"),
        }
    }
    attach_case_data(&mut c);
    c.validate()?;
    Ok(c)
}

pub fn parse_config(text: &str) -> Result<SimConfig> {
    parse_config_with(text, None)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Serialize every key; programmatic datum and forcing closures are not
/// representable and come back as the case default.
pub fn to_config_text(c: &SimConfig) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    };
    put("case", c.case.to_string());
    put("basis", c.basis.to_string());
    put("N", c.n.to_string());
    put("M", c.m.to_string());
    put("dt", c.dt.to_string());
    put("t_end", c.t_end.to_string());
    put("alpha", c.alpha.to_string());
    put("stepper", c.stepper.to_string());
    put("field_coupling", c.field_coupling.to_string());
    if let Some(s) = c.cfl_sigma {
        put("cfl_sigma", s.to_string());
    }
    put("x_min", c.x_extent.0.to_string());
    put("x_max", c.x_extent.1.to_string());
    if let VelocityExtent::Finite { lo, hi } = c.v_extent {
        put("v_min", lo.to_string());
        put("v_max", hi.to_string());
    }
    put("diag_every", c.diag_every.to_string());
    put("snapshot_times", join(&c.snapshot_times));
    put("moment_orders", join(&c.moment_orders));
    put("interp_alphas", join(&c.interp_alphas));
    put("out_dir", c.out_dir.display().to_string());
    out
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::config::StepperKind;

    #[test]
    fn hermite_two_stream_document() {
        let c = parse_config("case=two_stream\nbasis=hermite\nN=16\nM=16\ndt=0.01\nalpha=1.0").unwrap();
        assert_eq!(c.basis, BasisKind::Hermite);
        assert_eq!(c.t_end, 30.0);
        assert_eq!(c.v_extent, VelocityExtent::WholeLine);
        assert_eq!(c.datum, InitialDatum::two_stream());
    }

    #[test]
    fn rejections() {
        assert!(matches!(parse_config("basis=legendre\nalpha=2.0"), Err(Error::Config(_))));
        assert!(parse_config("dt=-1").is_err());
        match parse_config("N=16\n\n# note\nfoo=3") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        match parse_config("N=16\nM sixteen") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_config("N=abc") {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 1);
                assert!(msg.contains("N"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_config("N=16\nN=32").is_err());
        assert!(parse_config("basis=hermite\nv_min=-3").is_err());
        assert!(parse_config("basis=spline").is_err());
    }

    #[test]
    fn comments_and_whitespace() {
        let c = parse_config("  basis = legendre   # trailing\n# full line\nstepper=euler\nsnapshot_times=1, 2.5 ,3\n").unwrap();
        assert_eq!(c.basis, BasisKind::Legendre);
        assert_eq!(c.stepper, StepperKind::Euler);
        assert_eq!(c.snapshot_times, vec![1.0, 2.5, 3.0]);
    }

    #[test]
    fn case_override_and_case_data() {
        let c = parse_config_with("case=two_stream", Some(CaseKind::ManufacturedConvergence)).unwrap();
        assert_eq!(c.case, CaseKind::ManufacturedConvergence);
        assert!(matches!(c.datum, InitialDatum::Manufactured(_)));
        assert!(matches!(c.forcing, Forcing::Manufactured(_)));
        assert_eq!(c.t_end, 1.0);
    }

    #[test]
    fn defaults_round_trip() {
        for case in ["two_stream", "interpolation_study", "manufactured_convergence", "custom"] {
            for basis in ["fourier", "legendre", "hermite"] {
                let c = parse_config(&format!("case={case}\nbasis={basis}")).unwrap();
                assert_eq!(parse_config(&to_config_text(&c)).unwrap(), c);
            }
        }
    }

    proptest! {
        #[test]
        fn config_round_trip(
            basis in 0usize..3,
            n in 2usize..20,
            m in 2usize..20,
            dt in 1e-5f64..0.1,
            t_end in 0.0f64..50.0,
            alpha in 0.2f64..3.0,
            euler in any::<bool>(),
            frozen in any::<bool>(),
            sigma in proptest::option::of(0.5f64..3.0),
            lo in -10.0f64..-1.0,
            width in 0.5f64..20.0,
            diag in 1usize..50,
            snaps in proptest::collection::vec(0.0f64..40.0, 0..4),
            orders in proptest::collection::vec(0u32..6, 0..4),
        ) {
            let basis = [BasisKind::FourierPeriodic, BasisKind::Legendre, BasisKind::Hermite][basis];
            let mut c = case_defaults(CaseKind::TwoStream, basis);
            c.n = 2 * n;
            c.m = 2 * m;
            c.dt = dt;
            c.t_end = t_end;
            if basis == BasisKind::Hermite {
                c.alpha = alpha;
            } else {
                c.v_extent = VelocityExtent::Finite { lo, hi: lo + width };
            }
            c.stepper = if euler { StepperKind::Euler } else { StepperKind::Bdf2 };
            c.field_coupling = if frozen { crate::config::FieldCoupling::Frozen } else { crate::config::FieldCoupling::Extrapolated };
            c.cfl_sigma = sigma;
            c.x_extent = (lo, lo + 2.0 * width);
            c.diag_every = diag;
            c.snapshot_times = snaps;
            c.moment_orders = orders;
            attach_case_data(&mut c);
            let back = parse_config(&to_config_text(&c)).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
