use super::{dot, Family, IVec, RootError, RootSystem};
use crate::exact::{lcm_denominators, q, q_frac, QMatrix, Q};
use num_traits::{ToPrimitive, Zero};

fn unit(n: usize, i: usize, c: i64) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = q(c);
    v
}

fn pm(n: usize, i: usize, si: i64, j: usize, sj: i64) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = q(si);
    v[j] += q(sj);
    v
}

fn dq(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `±εᵢ ± εⱼ` for `i < j` (or only `εᵢ − εⱼ`, `i ≠ j` when `diff_only`).
fn pair_roots(n: usize, diff_only: bool) -> Vec<Vec<Q>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            out.push(pm(n, i, 1, j, -1));
            if !diff_only && i < j {
                out.push(pm(n, i, 1, j, 1));
                out.push(pm(n, i, -1, j, -1));
            }
        }
    }
    out
}

fn chain_simple(n: usize, count: usize) -> Vec<Vec<Q>> {
    (0..count).map(|i| pm(n, i, 1, i + 1, -1)).collect()
}

/// Half-integer vectors `½(±1,…,±1)` in dimension 8 with an even number of minus signs.
fn e8_half_roots() -> Vec<Vec<Q>> {
    (0u32..256)
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| {
            (0..8)
                .map(|k| if m >> k & 1 == 1 { q_frac(-1, 2) } else { q_frac(1, 2) })
                .collect()
        })
        .collect()
}

fn e8_simple() -> Vec<Vec<Q>> {
    let h = q_frac(1, 2);
    let mut a1 = vec![-h.clone(); 8];
    a1[0] = h.clone();
    a1[7] = h;
    let mut s = vec![a1, pm(8, 0, 1, 1, 1)];
    for k in 1..7 {
        s.push(pm(8, k, 1, k - 1, -1));
    }
    s
}

fn cartan_of(simple: &[Vec<Q>]) -> Result<Vec<Vec<i64>>, RootError> {
    simple
        .iter()
        .map(|bi| {
            simple
                .iter()
                .map(|bj| {
                    let c = q(2) * dq(bi, bj) / dq(bj, bj);
                    if c.is_integer() {
                        Ok(c.to_integer().to_i64().unwrap())
                    } else {
                        Err(RootError::Inconsistent("non-integral Cartan entry".into()))
                    }
                })
                .collect()
        })
        .collect()
}

/// Basis dual to the simple coroots: `ϖ = cartan⁻¹ · simple`.
fn dual_basis(simple: &[Vec<Q>], cartan: &[Vec<i64>]) -> Result<Vec<Vec<Q>>, RootError> {
    let m = QMatrix::from_i64_rows(cartan)
        .inverse()
        .ok_or_else(|| RootError::Inconsistent("singular Cartan matrix".into()))?;
    let n = simple[0].len();
    Ok((0..simple.len())
        .map(|i| {
            let mut w = vec![Q::zero(); n];
            for (j, s) in simple.iter().enumerate() {
                for (wk, sk) in w.iter_mut().zip(s) {
                    *wk += &m[(i, j)] * sk;
                }
            }
            w
        })
        .collect())
}

struct RawSystem {
    ambient: usize,
    roots: Vec<Vec<Q>>,
    simple: Vec<Vec<Q>>,
    /// Simple roots whose dual basis gives the fundamental weights, if different.
    weight_simple: Option<Vec<Vec<Q>>>,
}

fn raw(family: Family, l: usize) -> RawSystem {
    match family {
        Family::A => {
            let n = l + 1;
            RawSystem {
                ambient: n,
                roots: pair_roots(n, true),
                simple: chain_simple(n, l),
                weight_simple: None,
            }
        }
        Family::B | Family::C | Family::BC => {
            let mut roots = pair_roots(l, false);
            let short: Vec<Vec<Q>> = (0..l).flat_map(|i| [unit(l, i, 1), unit(l, i, -1)]).collect();
            let long: Vec<Vec<Q>> = (0..l).flat_map(|i| [unit(l, i, 2), unit(l, i, -2)]).collect();
            let mut b_simple = chain_simple(l, l - 1);
            let mut c_simple = b_simple.clone();
            b_simple.push(unit(l, l - 1, 1));
            c_simple.push(unit(l, l - 1, 2));
            match family {
                Family::B => {
                    roots.extend(short);
                    RawSystem {
                        ambient: l,
                        roots,
                        simple: b_simple,
                        weight_simple: None,
                    }
                }
                Family::C => {
                    roots.extend(long);
                    RawSystem {
                        ambient: l,
                        roots,
                        simple: c_simple,
                        weight_simple: None,
                    }
                }
                _ => {
                    roots.extend(short);
                    roots.extend(long);
                    RawSystem {
                        ambient: l,
                        roots,
                        simple: b_simple,
                        weight_simple: Some(c_simple),
                    }
                }
            }
        }
        Family::D => {
            let mut simple = chain_simple(l, l - 1);
            simple.push(pm(l, l - 2, 1, l - 1, 1));
            RawSystem {
                ambient: l,
                roots: pair_roots(l, false),
                simple,
                weight_simple: None,
            }
        }
        Family::G2 => {
            let mut roots = pair_roots(3, true);
            for i in 0..3 {
                let mut v = vec![q(-1); 3];
                v[i] = q(2);
                roots.push(v.iter().map(|x| -x).collect());
                roots.push(v);
            }
            RawSystem {
                ambient: 3,
                roots,
                simple: vec![pm(3, 0, 1, 1, -1), vec![q(-2), q(1), q(1)]],
                weight_simple: None,
            }
        }
        Family::F4 => {
            let mut roots = pair_roots(4, false);
            roots.extend((0..4).flat_map(|i| [unit(4, i, 1), unit(4, i, -1)]));
            roots.extend((0u32..16).map(|m| {
                (0..4)
                    .map(|k| if m >> k & 1 == 1 { q_frac(-1, 2) } else { q_frac(1, 2) })
                    .collect()
            }));
            let h = q_frac(1, 2);
            RawSystem {
                ambient: 4,
                roots,
                simple: vec![
                    pm(4, 1, 1, 2, -1),
                    pm(4, 2, 1, 3, -1),
                    unit(4, 3, 1),
                    vec![h.clone(), -h.clone(), -h.clone(), -h],
                ],
                weight_simple: None,
            }
        }
        Family::E6 | Family::E7 | Family::E8 => {
            let mut all = pair_roots(8, false);
            all.extend(e8_half_roots());
            let keep: Box<dyn Fn(&[Q]) -> bool> = match family {
                Family::E8 => Box::new(|_| true),
                Family::E7 => Box::new(|v| (&v[6] + &v[7]).is_zero()),
                _ => Box::new(|v| v[5] == v[6] && (&v[6] + &v[7]).is_zero()),
            };
            let rank = family.fixed_rank().unwrap();
            RawSystem {
                ambient: 8,
                roots: all.into_iter().filter(|v| keep(v)).collect(),
                simple: e8_simple().into_iter().take(rank).collect(),
                weight_simple: None,
            }
        }
    }
}

pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem, RootError> {
    if !family.is_valid_rank(rank) {
        return Err(RootError::InvalidRank {
            family: family.to_string(),
            rank,
        });
    }
    let raw = raw(family, rank);
    let cartan = cartan_of(&raw.simple)?;
    let dual = dual_basis(&raw.simple, &cartan)?;
    let fundamental = match &raw.weight_simple {
        Some(ws) => dual_basis(ws, &cartan_of(ws)?)?,
        None => dual.clone(),
    };
    let denom = lcm_denominators(
        raw.roots
            .iter()
            .chain(&raw.simple)
            .chain(&dual)
            .chain(&fundamental)
            .flatten(),
    );
    let denom_q = Q::from_integer(denom.clone());
    let scale = |v: &[Q]| -> IVec {
        v.iter()
            .map(|x| (x * &denom_q).to_integer().to_i64().expect("scaled entry fits in i64"))
            .collect()
    };
    let mut roots: Vec<IVec> = raw.roots.iter().map(|r| scale(r)).collect();
    roots.sort();
    roots.dedup();
    let simple: Vec<IVec> = raw.simple.iter().map(|r| scale(r)).collect();
    let dual: Vec<IVec> = dual.iter().map(|r| scale(r)).collect();
    let h: IVec = (0..raw.ambient).map(|k| dual.iter().map(|w| w[k]).sum()).collect();
    let positive: Vec<IVec> = roots.iter().filter(|r| dot(r, &h) > 0).cloned().collect();
    let rs = RootSystem {
        family,
        rank,
        ambient: raw.ambient,
        denom: denom.to_i64().expect("denominator fits in i64"),
        roots,
        positive,
        simple,
        cartan,
        fundamental: fundamental.iter().map(|r| scale(r)).collect(),
        coweight_dual: dual,
    };
    rs.validate()?;
    if let Some(ws) = &raw.weight_simple {
        let ws: Vec<IVec> = ws.iter().map(|r| scale(r)).collect();
        for (i, w) in rs.fundamental.iter().enumerate() {
            for (j, b) in ws.iter().enumerate() {
                if 2 * dot(w, b) != (i == j) as i64 * dot(b, b) {
                    return Err(RootError::Inconsistent("BC weights not dual to C base".into()));
                }
            }
        }
    }
    Ok(rs)
}
