//! Parsing of list, range and domain arguments.

use std::path::PathBuf;

use hardy_core::ConvexDomain;

/// Inclusive integer range `a..b`, a single value, or a comma list.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
        let b: usize = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| format!("bad range end in {s:?}"))?;
        if a > b {
            return Err(format!("empty range {s:?}"));
        }
        return Ok((a..=b).collect());
    }
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("bad integer {x:?}")))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(v)
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| {
            let x = x.trim();
            match x.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(format!("bad number {x:?}")),
            }
        })
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainArg {
    /// centred at the origin, in each requested dimension
    Ball(f64),
    /// one extent: a cube in each requested dimension; several: a fixed box
    Box(Vec<f64>),
    Poly(PathBuf),
}

/// `ball:<R>`, `box:<a>[x<b>...]` or `poly:<file>`, several separated by `;`.
pub fn parse_domains(s: &str) -> Result<Vec<DomainArg>, String> {
    s.split(';')
        .map(str::trim)
        .filter(|d| !d.is_empty())
        .map(|d| {
            let (kind, arg) = d.split_once(':').ok_or_else(|| format!("bad domain {d:?}"))?;
            match kind {
                "ball" => {
                    let r: f64 = arg.parse().map_err(|_| format!("bad radius in {d:?}"))?;
                    if !(r > 0.0 && r.is_finite()) {
                        return Err(format!("radius must be positive in {d:?}"));
                    }
                    Ok(DomainArg::Ball(r))
                }
                "box" => {
                    let ext = parse_f64_list(&arg.replace('x', ","))?;
                    if ext.iter().any(|e| !(*e > 0.0)) {
                        return Err(format!("box extents must be positive in {d:?}"));
                    }
                    Ok(DomainArg::Box(ext))
                }
                "poly" => Ok(DomainArg::Poly(PathBuf::from(arg))),
                _ => Err(format!("unknown domain kind {kind:?}")),
            }
        })
        .collect()
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl DomainArg {
    /// Labelled domains: one per entry of `dims` for balls and cubes, a single one otherwise.
    pub fn instantiate(&self, dims: &[usize]) -> Result<Vec<(String, ConvexDomain)>, String> {
        let err = |e: hardy_core::HardyError| e.to_string();
        match self {
            DomainArg::Ball(r) => dims
                .iter()
                .map(|&n| {
                    let label = if *r == 1.0 {
                        "ball".to_string()
                    } else {
                        format!("ball-r{}", fmt_num(*r))
                    };
                    Ok((label, ConvexDomain::ball(vec![0.0; n], *r).map_err(err)?))
                })
                .collect(),
            DomainArg::Box(ext) if ext.len() == 1 => dims
                .iter()
                .map(|&n| {
                    let e = ext[0];
                    let label = if e == 1.0 {
                        "cube".to_string()
                    } else {
                        format!("cube-{}", fmt_num(e))
                    };
                    Ok((label, ConvexDomain::boxed(vec![0.0; n], vec![e; n]).map_err(err)?))
                })
                .collect(),
            DomainArg::Box(ext) => {
                let label = format!("box-{}", ext.iter().map(|e| fmt_num(*e)).collect::<Vec<_>>().join("x"));
                Ok(vec![(
                    label,
                    ConvexDomain::boxed(vec![0.0; ext.len()], ext.clone()).map_err(err)?,
                )])
            }
            DomainArg::Poly(path) => {
                let dom = ConvexDomain::read_polytope(path).map_err(err)?;
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("poly");
                Ok(vec![(format!("poly-{stem}"), dom)])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_usize_list("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_usize_list("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_usize_list("3").unwrap(), vec![3]);
        assert_eq!(parse_usize_list("0, 2").unwrap(), vec![0, 2]);
        assert!(parse_usize_list("5..2").is_err());
        assert!(parse_usize_list("a").is_err());
        assert_eq!(parse_f64_list("1.5,2, 3").unwrap(), vec![1.5, 2.0, 3.0]);
        assert!(parse_f64_list("1,nan").is_err());
    }

    #[test]
    fn domains() {
        let d = parse_domains("ball:1; box:1 ;box:1x2").unwrap();
        assert_eq!(
            d,
            vec![
                DomainArg::Ball(1.0),
                DomainArg::Box(vec![1.0]),
                DomainArg::Box(vec![1.0, 2.0])
            ]
        );
        let inst = d[1].instantiate(&[2, 3]).unwrap();
        assert_eq!(inst.len(), 2);
        assert_eq!(inst[1].0, "cube");
        assert_eq!(inst[1].1.dim(), 3);
        assert_eq!(d[2].instantiate(&[3]).unwrap()[0].0, "box-1x2");
        assert_eq!(
            parse_domains("ball:2").unwrap()[0].instantiate(&[2]).unwrap()[0].0,
            "ball-r2"
        );
        assert!(parse_domains("ball:-1").is_err());
        assert!(parse_domains("torus:1").is_err());
        assert!(parse_domains("poly:/nonexistent").unwrap()[0]
            .instantiate(&[2])
            .is_err());
    }
}
