//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Reference values come from brute-force evaluation in this file
//! or from the slow oracles in `corners_lab::oracle`.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use corners_lab::bohr::{
    attendant, check_regular, conv_support_stats, find_regular_epsilon, plus_minus, size_lower_bound_holds, BohrSet,
    BohrSpec, DEFAULT_KAPPA,
};
use corners_lab::constructions::{behrend_set, cornerfree_from_ap3free, green_symmetrize, random_subset};
use corners_lab::corners::count_corners;
use corners_lab::extremal::extremal_exhaustive;
use corners_lab::increment::{
    fourier_increment, iteration_driver, keps_check, nonuniform_increment, paley_set, required_gain_exact, BohrFamily,
    ConstantsConfig, Verdict,
};
use corners_lab::oracle::{ap3_free_naive, bohr_size_naive, box_norm4_naive, count_corners_naive, convolve_naive, dft_naive};
use corners_lab::spectral::{close, convolve, dft, DenseMap, DenseMap2D};
use corners_lab::uniformity::{box_norm, box_norm4, box_norm4_pairform, intermediate_attendants, intermediate_sets};
use corners_lab::{CornerMode, Error, GroupSpec, SeededRng, Shape, Subset, Subset2D};

type Outcome = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cyclic(n: u64) -> GroupSpec {
    GroupSpec::cyclic(n).unwrap()
}

fn gaussian_ish(r: &mut SeededRng) -> Complex64 {
    Complex64::new(2.0 * r.next_f64() - 1.0, 2.0 * r.next_f64() - 1.0)
}

fn random_map(g: &GroupSpec, r: &mut SeededRng) -> DenseMap {
    DenseMap::from_fn(g.clone(), |_| gaussian_ish(r))
}

fn random_map2(g: &GroupSpec, r: &mut SeededRng) -> DenseMap2D {
    DenseMap2D::from_fn(Shape::Group(g.clone()), |_, _| gaussian_ish(r))
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

const TOL: f64 = 1e-9;

fn spectral_identities() -> Outcome {
    let groups = [cyclic(8), cyclic(12), GroupSpec::new(vec![5, 5]).unwrap(), cyclic(101)];
    let mut r = SeededRng::new(1);
    let mut checked = 0;
    for g in &groups {
        let n = g.order() as f64;
        for _ in 0..100 {
            let f = random_map(g, &mut r);
            let h = random_map(g, &mut r);
            let (fh, hh) = (dft(&f), dft(&h));
            // Parseval.
            let lhs: f64 = f.values.iter().map(|v| v.norm_sqr()).sum();
            let rhs: f64 = fh.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
            ensure(close(lhs, rhs, TOL), || format!("{g}: Parseval {lhs} vs {rhs}"))?;
            // Inner products.
            let lhs: Complex64 = f.values.iter().zip(&h.values).map(|(a, b)| a * b.conj()).sum();
            let rhs: Complex64 = fh.values.iter().zip(&hh.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() / n;
            ensure((lhs - rhs).norm() <= TOL * lhs.norm().max(rhs.norm()).max(1.0), || {
                format!("{g}: inner product {lhs} vs {rhs}")
            })?;
            // Convolution energy.
            let c = convolve(&f, &h).unwrap();
            let lhs: f64 = c.values.iter().map(|v| v.norm_sqr()).sum();
            let rhs: f64 = fh.values.iter().zip(&hh.values).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).sum::<f64>() / n;
            ensure(close(lhs, rhs, TOL), || format!("{g}: convolution {lhs} vs {rhs}"))?;
            checked += 1;
        }
        // Fast paths against direct summation on a few inputs.
        for _ in 0..3 {
            let f = random_map(g, &mut r);
            let h = random_map(g, &mut r);
            let scale = f.values.iter().map(|v| v.norm()).sum::<f64>();
            for (a, b) in dft(&f).values.iter().zip(&dft_naive(&f).values) {
                ensure((a - b).norm() <= TOL * scale, || format!("{g}: transform differs from direct sum"))?;
            }
            let scale = scale * h.values.iter().map(|v| v.norm()).sum::<f64>();
            for (a, b) in convolve(&f, &h).unwrap().values.iter().zip(&convolve_naive(&f, &h).values) {
                ensure((a - b).norm() <= TOL * scale, || format!("{g}: convolution differs from direct sum"))?;
            }
        }
    }
    Ok(format!("{checked} functions, 4 groups"))
}

fn box_norm_coherence() -> Outcome {
    let groups = [cyclic(4), cyclic(8), cyclic(12), GroupSpec::new(vec![2, 6]).unwrap(), GroupSpec::new(vec![3, 3]).unwrap()];
    let mut r = SeededRng::new(2);
    for g in &groups {
        for i in 0..100 {
            let f = random_map2(g, &mut r);
            let (a, b) = (box_norm4(&f), box_norm4_pairform(&f));
            ensure(close(a, b, TOL), || format!("{g}: quadruple sum {a} vs pair form {b}"))?;
            if i < 5 {
                let c = box_norm4_naive(&f);
                ensure(close(a, c, TOL), || format!("{g}: fast {a} vs definitional {c}"))?;
            }
        }
        for _ in 0..200 {
            let f = random_map2(g, &mut r);
            let h = random_map2(g, &mut r);
            let s = box_norm(&f.add(&h).unwrap());
            let (nf, nh) = (box_norm(&f), box_norm(&h));
            ensure(s <= (nf + nh) * (1.0 + TOL), || format!("{g}: triangle {s} > {nf} + {nh}"))?;
            let c = gaussian_ish(&mut r);
            let scaled = box_norm(&f.scale(c));
            ensure(close(scaled, c.norm() * nf, TOL), || format!("{g}: homogeneity {scaled} vs {}", c.norm() * nf))?;
        }
    }
    Ok(format!("{} groups, 100 functions and 200 pairs each", groups.len()))
}

fn bohr_machinery() -> Outcome {
    let mut r = SeededRng::new(3);
    let orders = [7u64, 30, 101, 210, 1009, 2048, 5000, 9973, 10_000];
    let mut specs = 0;
    let mut pairs = 0;
    for &n in &orders {
        let g = cyclic(n);
        for d in 1..=3usize {
            for _ in 0..3 {
                let chars: Vec<_> = (0..d).map(|_| g.character_at(r.below(n) as usize)).collect();
                let eps = 0.05 + 0.4 * r.next_f64();
                let spec = BohrSpec::new(g.clone(), chars.clone(), eps, DEFAULT_KAPPA).unwrap();
                let set = BohrSet::new(&spec);
                ensure(size_lower_bound_holds(&set), || format!("Z_{n}, d = {d}, eps = {eps}: size {} below bound", set.size()))?;
                let naive = bohr_size_naive(&spec);
                ensure(naive == set.size(), || format!("Z_{n}: size {} vs direct {naive}", set.size()))?;
                let e1 = find_regular_epsilon(&g, &chars, eps, DEFAULT_KAPPA).map_err(|e| format!("Z_{n}, d = {d}: {e}"))?;
                ensure(e1 > eps / 2.0 && e1 < eps, || format!("radius {e1} outside ({}, {eps})", eps / 2.0))?;
                let reg = BohrSpec::new(g.clone(), chars.clone(), e1, DEFAULT_KAPPA).unwrap();
                ensure(check_regular(&reg), || format!("Z_{n}: radius {e1} fails the endpoint check"))?;
                let regset = BohrSet::new(&reg);
                ensure(size_lower_bound_holds(&regset), || "regular set below size bound".into())?;
                specs += 2;
                if pairs < 50 && n <= 2048 {
                    let (plus, minus) = plus_minus(&reg);
                    let (sp, sm) = (BohrSet::new(&plus), BohrSet::new(&minus));
                    ensure(sm.members().is_subset(regset.members()) && regset.members().is_subset(sp.members()), || {
                        "minus ⊆ set ⊆ plus fails".into()
                    })?;
                    let att = attendant(&reg, reg.window_ratio(), &[]).map_err(|e| e.to_string())?;
                    let st = conv_support_stats(&reg, &att).map_err(|e| e.to_string())?;
                    ensure(st.support_ok && st.full_ok && st.defect_ok, || format!("Z_{n}, d = {d}: {st:?}"))?;
                    pairs += 1;
                }
            }
        }
    }
    ensure(pairs >= 50, || format!("only {pairs} attendant pairs generated"))?;
    Ok(format!("{specs} specs, {pairs} attendant pairs"))
}

fn corner_statistics() -> Outcome {
    let g = cyclic(101);
    let n = 101.0f64;
    let mut out = Vec::new();
    for delta in [0.2, 0.5] {
        let counts: Vec<f64> = (0..50)
            .map(|seed| {
                let a = random_subset(Shape::Group(g.clone()), delta, 1000 + seed).unwrap();
                count_corners(&a, CornerMode::GroupNonZero).unwrap() as f64
            })
            .collect();
        let m = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / m;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let se = (var / m).sqrt();
        let expected = delta.powi(3) * n * n * (n - 1.0);
        let z = (mean - expected) / se;
        ensure(z.abs() <= 5.0, || format!("delta {delta}: mean {mean}, expected {expected}, z = {z}"))?;
        out.push(format!("delta {delta}: z = {z:.2}"));
    }
    Ok(out.join(", "))
}

/// Largest corner-free subset of the `n×n` grid by scanning every subset.
fn brute_force_max(n: usize, mode: CornerMode) -> usize {
    let cells = n * n;
    (0u32..1 << cells)
        .filter(|m| {
            let a = Subset2D::from_fn(Shape::Grid(n), |x, y| m >> (x * n + y) & 1 == 1);
            count_corners_naive(&a, mode) == 0
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap()
}

fn extremal_oracle() -> Outcome {
    let mode = CornerMode::GridPositive;
    let two = extremal_exhaustive(2, mode).map_err(|e| e.to_string())?;
    ensure(two.optimal && two.density() * 4.0 == 3.0, || format!("L(2)·4 = {}", two.density() * 4.0))?;
    let mut sizes = Vec::new();
    for n in [3, 4] {
        let a = extremal_exhaustive(n, mode).map_err(|e| e.to_string())?;
        let b = extremal_exhaustive(n, mode).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("n = {n}: results differ across runs"))?;
        ensure(a.optimal, || format!("n = {n}: search did not finish"))?;
        let w = a.witness_set();
        ensure(w.count() == a.max_size && count_corners(&w, mode).unwrap() == 0, || format!("n = {n}: bad witness"))?;
        let bf = brute_force_max(n, mode);
        ensure(bf == a.max_size, || format!("n = {n}: search {} vs subset scan {bf}", a.max_size))?;
        sizes.push(format!("n = {n}: {}", a.max_size));
    }
    Ok(format!("L(2)·4 = 3, {}", sizes.join(", ")))
}

/// Greedy corner-free (`d > 0`) subset of the `side×side` grid.
fn greedy_cornerfree(side: usize, r: &mut SeededRng) -> Subset2D {
    let mut cells: Vec<(usize, usize)> = (0..side).flat_map(|x| (0..side).map(move |y| (x, y))).collect();
    for i in (1..cells.len()).rev() {
        cells.swap(i, r.below(i as u64 + 1) as usize);
    }
    let mut a: HashSet<(i64, i64)> = HashSet::new();
    let keep = cells.len() / 3;
    for &(x, y) in cells.iter().take(keep) {
        let (x, y) = (x as i64, y as i64);
        let has = |p: (i64, i64)| a.contains(&p);
        let creates = (1..side as i64).any(|d| {
            (has((x + d, y)) && has((x, y + d)))
                || (has((x - d, y)) && has((x - d, y + d)))
                || (has((x, y - d)) && has((x + d, y - d)))
        });
        if !creates {
            a.insert((x, y));
        }
    }
    Subset2D::from_points(Shape::Grid(side), a.into_iter().map(|(x, y)| (x as usize, y as usize))).unwrap()
}

fn constructions() -> Outcome {
    let mut sizes: Vec<u64> = (1..=300).collect();
    sizes.extend([500, 1000, 2000, 4096, 5000, 7777, 10_000]);
    for &n in &sizes {
        let b = behrend_set(n).map_err(|e| e.to_string())?;
        let v: Vec<i64> = b.iter().map(|&x| x as i64).collect();
        ensure(v.iter().all(|&x| x >= 1 && x <= n as i64), || format!("N = {n}: value out of range"))?;
        ensure(ap3_free_naive(&v), || format!("N = {n}: contains a progression"))?;
    }
    for n in 2..=50usize {
        let b: Vec<i64> = behrend_set(n as u64).unwrap().iter().map(|&x| x as i64 - 1).collect();
        let a = cornerfree_from_ap3free(&b, n, CornerMode::GridNonZero).map_err(|e| e.to_string())?;
        ensure(count_corners_naive(&a, CornerMode::GridNonZero) == 0, || format!("grid N = {n}: corner found"))?;
        // Values below N/2 cannot wrap around, so the set stays progression-free mod N.
        let half: Vec<i64> = behrend_set((n as u64).div_ceil(2)).unwrap().iter().map(|&x| x as i64 - 1).collect();
        let a = cornerfree_from_ap3free(&half, n, CornerMode::GroupNonZero).map_err(|e| e.to_string())?;
        ensure(count_corners_naive(&a, CornerMode::GroupNonZero) == 0, || format!("Z_{n}: corner found"))?;
    }
    let mut r = SeededRng::new(6);
    for i in 0..20 {
        let n = 3 + i % 13;
        let side = 2 * n + 1;
        let a = greedy_cornerfree(side, &mut r);
        ensure(count_corners_naive(&a, CornerMode::GridPositive) == 0, || "generator produced a corner".into())?;
        let (out, info) = green_symmetrize(&a).map_err(|e| e.to_string())?;
        ensure(out.points().all(|(x, y)| a.contains(x, y)), || format!("N = {n}: output not a subset"))?;
        ensure(count_corners_naive(&out, CornerMode::GridNonZero) == 0, || format!("N = {n}: output has a corner"))?;
        let delta = a.count() as f64 / (side * side) as f64;
        let bound = delta * delta * (side * side) as f64 / 4.0;
        ensure(out.count() as f64 >= bound, || format!("N = {n}: size {} below {bound}", out.count()))?;
        ensure(info.output_size == out.count(), || "reported size differs".into())?;
    }
    Ok(format!("{} Behrend sizes, 49 grid and group lifts, 20 symmetrizations", sizes.len()))
}

fn planted(n: u64, seed: u64) -> Subset2D {
    let mut r = SeededRng::new(seed);
    let (w, h) = (n as usize * (4 + r.below(3) as usize) / 10, n as usize * (4 + r.below(3) as usize) / 10);
    let noise = 0.02 + 0.06 * r.next_f64();
    Subset2D::from_fn(Shape::Group(cyclic(n)), |x, y| (x < w && y < h) || r.bernoulli(noise))
}

fn increment_correctness() -> Outcome {
    let mut gains = Vec::new();
    for i in 0..20u64 {
        let n = 12 + i % 5;
        let a = planted(n, 70 + i);
        let e = Subset::full(a.shape().clone());
        let m = a.count();
        let size = (n * n) as usize;
        let delta = m as f64 / size as f64;
        let alpha = delta.powi(4) / 8.0;
        let inc = nonuniform_increment(&a, &e, &e, alpha).map_err(|err| format!("instance {i}: {err}"))?;
        // Count A ∩ (F₁×F₂) cell by cell.
        let f1: Vec<usize> = inc.f1.iter().collect();
        let f2: Vec<usize> = inc.f2.iter().collect();
        let count = f1.iter().flat_map(|&x| f2.iter().map(move |&y| (x, y))).filter(|&(x, y)| a.contains(x, y)).count();
        let g = required_gain_exact(alpha, m, n as usize, n as usize);
        let d = BigRational::new(BigInt::from(m), BigInt::from(size));
        let density_bound = int(count) > (d + &g) * int(f1.len() * f2.len());
        let size_bound = int(f1.len()) >= &g * int(n as usize) && int(f2.len()) >= &g * int(n as usize);
        ensure(density_bound && size_bound, || format!("instance {i}: count {count} on {}x{}", f1.len(), f2.len()))?;
        ensure(count == inc.count, || format!("instance {i}: reported count {} vs {count}", inc.count))?;
        gains.push(inc.new_density - delta);
    }
    for i in 0..20u64 {
        let shape = Shape::Group(cyclic(64));
        let a = random_subset(shape.clone(), 0.5, 500 + i).unwrap();
        let e = Subset::full(shape);
        let delta = a.count() as f64 / 4096.0;
        match nonuniform_increment(&a, &e, &e, delta.powi(4) / 8.0) {
            Err(Error::Uniform { .. }) => {}
            other => return Err(format!("random instance {i}: expected the uniformity refusal, got {other:?}")),
        }
    }
    let min = gains.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(format!("20 planted (min gain {min:.3}), 20 refusals"))
}

fn fourier_increments() -> Outcome {
    let g = cyclic(1009);
    let lam = BohrSpec::from_indices(g.clone(), &[0], 1.0, DEFAULT_KAPPA).unwrap();
    let alpha = 0.2;
    let mut r = SeededRng::new(8);
    let mut least = f64::INFINITY;
    for i in 0..10 {
        let xi = 1 + r.below(504);
        let width = 0.15 + 0.2 * r.next_f64();
        let flip = 0.05 * r.next_f64();
        let q = Subset::from_fn(Shape::Group(g.clone()), |n| {
            let t = (xi * n as u64) % 1009;
            let near = (t.min(1009 - t) as f64) < width * 1009.0;
            near != r.bernoulli(flip)
        });
        let inc = fourier_increment(&q, &lam, alpha, alpha / 32.0).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(inc.dim_after == inc.dim_before + 1, || format!("instance {i}: dimension {} -> {}", inc.dim_before, inc.dim_after))?;
        // Mean-square deviation of local densities, by enumeration.
        let k = BohrSet::new(&inc.attendant).centered_indices();
        let delta = q.count() as f64 / 1009.0;
        let msd = (0..1009usize)
            .map(|n| {
                let hits = k.iter().filter(|&&t| q.contains((t + n) % 1009)).count();
                (hits as f64 / k.len() as f64 - delta).powi(2)
            })
            .sum::<f64>()
            / 1009.0;
        ensure(msd >= alpha * alpha / 4.0, || format!("instance {i}: {msd} < {}", alpha * alpha / 4.0))?;
        ensure((msd - inc.mean_square_dev).abs() < 1e-12, || format!("instance {i}: reported {}", inc.mean_square_dev))?;
        least = least.min(msd);
    }
    Ok(format!("10 instances, least deviation {least:.4} vs {:.4}", alpha * alpha / 4.0))
}

fn index_oracles() -> Outcome {
    let mut r = SeededRng::new(9);
    for i in 0..100 {
        let len = 10 + r.below(200) as usize;
        let mut z: Vec<f64> = (0..len).map(|_| (2.0 * r.next_f64() - 1.0).powi(1 + (i % 3))).collect();
        let mean = z.iter().sum::<f64>() / len as f64;
        z.iter_mut().for_each(|v| *v -= mean);
        let top = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if top > 1.0 {
            z.iter_mut().for_each(|v| *v /= top);
        }
        for p in [1.5, 2.0, 3.0] {
            let s = paley_set(&z, p).map_err(|e| format!("Z {i}: {e}"))?;
            let sigma = z.iter().map(|v| v.abs().powf(p)).sum::<f64>() / len as f64;
            let measure = z.iter().filter(|&&v| v > sigma / 5.0).count() as f64 / len as f64;
            ensure(measure >= sigma / 5.0, || format!("Z {i}, p = {p}: {measure} < {}", sigma / 5.0))?;
            ensure(s.set.len() as f64 / len as f64 == measure, || format!("Z {i}, p = {p}: reported {}", s.measure))?;
        }
    }
    let mut families = 0;
    for (n, eps, depth) in [(60, 0.3, 1), (60, 0.3, 2), (80, 0.25, 1), (80, 0.35, 2), (100, 0.3, 1), (100, 0.3, 2), (90, 0.4, 2), (70, 0.3, 2), (50, 0.4, 1), (100, 0.2, 2)] {
        let g = cyclic(n);
        let lam = BohrSpec::from_indices(g.clone(), &[1], eps, 0.9).unwrap();
        let fam = BohrFamily::refining(&lam, depth, 0.9, &[]).map_err(|e| e.to_string())?;
        let w = BohrSet::new(&fam.levels[0].lam).centered_indices();
        let p = 0.2 + 0.6 * r.next_f64();
        let q = Subset2D::from_fn(Shape::Group(g), |x, y| w.contains(&x) && w.contains(&y) && r.bernoulli(p));
        let rep = keps_check(&fam, &q).map_err(|e| format!("Z_{n}: {e}"))?;
        let ok = rep.values.iter().zip(&rep.bounds).all(|(v, b)| (v - rep.delta).abs() <= *b);
        ensure(ok && rep.holds, || format!("Z_{n}, depth {depth}: {rep:?}"))?;
        families += 1;
    }
    let mut triples = 0;
    for (n, alpha) in [(211u64, 0.5), (211, 0.25), (211, 0.05), (307, 0.5), (307, 0.2), (401, 0.3), (401, 0.04), (503, 0.5), (503, 0.1), (1009, 0.3)] {
        let g = cyclic(n);
        let e = find_regular_epsilon(&g, &[g.character_at(1)], 0.4, DEFAULT_KAPPA).map_err(|e| e.to_string())?;
        let lam = BohrSpec::from_indices(g.clone(), &[1], e, DEFAULT_KAPPA).unwrap();
        let (lp, lpp) = intermediate_attendants(&lam, alpha).map_err(|e| e.to_string())?;
        let members = BohrSet::new(&lam).members().clone();
        // Q is Λ with a sprinkling of points removed, sparse enough for the hypotheses.
        let drop = alpha * alpha / 2.0;
        let q = Subset::from_fn(members.shape().clone(), |x| members.contains(x) && !r.bernoulli(drop));
        let rep = intermediate_sets(&q, &lam, &lp, &lpp, alpha).map_err(|e| e.to_string())?;
        ensure(rep.consistent(), || format!("Z_{n}, alpha {alpha}: {rep:?}"))?;
        ensure(rep.t1 || rep.t2 || rep.t3, || format!("Z_{n}, alpha {alpha}: no hypothesis holds"))?;
        triples += 1;
    }
    Ok(format!("300 Paley checks, {families} families, {triples} triples"))
}

fn driver() -> Outcome {
    let cfg = ConstantsConfig::desk();
    let full = Subset2D::full(Shape::Group(cyclic(11)));
    let t = iteration_driver(&full, &cfg, 0).map_err(|e| e.to_string())?;
    match (&t.steps[0].verdict, t.steps.len()) {
        (Verdict::CornerCount { corners, .. }, 1) if *corners == 11 * 11 * 10 => {}
        (v, len) => return Err(format!("full plane: {v:?} after {len} steps")),
    }

    // The Behrend set for N = 8, and a denser progression-free set of differences.
    let behrend: Vec<i64> = behrend_set(8).unwrap().iter().map(|&x| x as i64 - 1).collect();
    let mut cornerfree_steps = 0;
    for b in [behrend, vec![0, 1, 3, 4]] {
        let a = cornerfree_from_ap3free(&b, 8, CornerMode::GridNonZero).map_err(|e| e.to_string())?;
        let t = iteration_driver(&a, &cfg, 1).map_err(|e| e.to_string())?;
        for s in &t.steps {
            if let Verdict::CornerCount { corners, .. } = s.verdict {
                ensure(corners == 0, || format!("B = {b:?}: step {} reports {corners} corners", s.step))?;
            }
            if let (Some(f1), Some(f2)) = (&s.f1, &s.f2) {
                let sub = a.restrict(f1, f2).unwrap();
                ensure(count_corners_naive(&sub, CornerMode::GridNonZero) == 0, || "restriction has a corner".into())?;
            }
        }
        t.check(&a).map_err(|e| format!("B = {b:?}: {e}"))?;
        cornerfree_steps += t.steps.len();
    }

    let mut increments = 0;
    for seed in 0..8u64 {
        let a = planted(16, 200 + seed);
        let t = iteration_driver(&a, &cfg, seed).map_err(|e| e.to_string())?;
        t.check(&a).map_err(|e| format!("planted {seed}: {e}"))?;
        let steps: Vec<_> = t.steps.iter().filter(|s| s.verdict.is_increment()).collect();
        ensure(!steps.is_empty(), || format!("planted {seed}: no increment step"))?;
        for s in &steps {
            ensure(s.new_density.unwrap() > s.delta, || format!("planted {seed}: step {} does not increase density", s.step))?;
        }
        for w in t.steps.windows(2) {
            ensure(w[1].delta > w[0].delta, || format!("planted {seed}: density not increasing at step {}", w[1].step))?;
        }
        increments += steps.len();
    }
    Ok(format!("full plane at step 0, {cornerfree_steps} corner-free steps, {increments} planted increments"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("spectral identities", spectral_identities, 10),
        ("box-norm coherence", box_norm_coherence, 30),
        ("Bohr machinery", bohr_machinery, 60),
        ("corner statistics", corner_statistics, 60),
        ("extremal oracle", extremal_oracle, 120),
        ("constructions", constructions, 600),
        ("increment correctness", increment_correctness, 120),
        ("Fourier increment", fourier_increments, 600),
        ("index oracles", index_oracles, 600),
        ("driver", driver, 600),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let out = out.and_then(|m| {
            if took <= Duration::from_secs(*limit) {
                Ok(m)
            } else {
                Err(format!("{m}; took {took:.1?}, limit {limit}s"))
            }
        });
        match out {
            Ok(m) => println!("PASS  {:>2}  {name}: {m} ({took:.2?})", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {m} ({took:.2?})", i + 1)
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
