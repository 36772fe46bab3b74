//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS` line (visible with `--show-output`). Every
//! criterion re-derives its ground truth independently — brute-force
//! residue enumeration, hand-rolled linear algebra, or frozen values
//! confirmed by an external reimplementation of the pipeline.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use mildcurve::cohomology::{excision_identity_holds, global_profile, h1_via_characters, s_min};
use mildcurve::kummer::kummer_group;
use mildcurve::mildness::{
    certify, certify_with_roots, enlargement_check, mild_split_probe, shape_check, verify,
    vv_block_zero, Certificate, EnlargementOutcome, RootChoice,
};
use mildcurve::modarith::{is_prime, AvoidanceSet, PrimeStream};
use mildcurve::seeker::SearchConfig;

fn tame_pool(p: u64, limit: u64) -> Vec<u64> {
    PrimeStream::new(p, &AvoidanceSet::none(), 2).take_while(|&q| q < limit).collect()
}

fn primes_below(limit: u64) -> Vec<u64> {
    (2..limit).filter(|&n| is_prime(n)).collect()
}

fn sample_distinct(rng: &mut StdRng, pool: &[u64], count: usize, exclude: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    while out.len() < count {
        let pick = pool[rng.gen_range(0..pool.len())];
        if !out.contains(&pick) && !exclude.contains(&pick) {
            out.push(pick);
        }
    }
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------
// Criterion 1: the character count of h¹ equals the dimension formula and
// the excision identity holds, on 200 randomized marked tame curves.
// ---------------------------------------------------------------------
#[test]
fn criterion_1_h1_characters_and_excision() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let pools: Vec<(u64, Vec<u64>)> =
        [3u64, 5, 7].iter().map(|&p| (p, tame_pool(p, 10_000))).collect();
    let t_pool = primes_below(100);
    for case in 0..200 {
        let (p, pool) = &pools[case % 3];
        let s_len = rng.gen_range(1..=4);
        let s = sample_distinct(&mut rng, pool, s_len, &[]);
        let t_len = rng.gen_range(0..=2);
        let t = sample_distinct(&mut rng, &t_pool, t_len, &s);
        let profile = global_profile(&s, &t, *p).unwrap();
        let by_characters = h1_via_characters(&s, &t, *p).unwrap();
        assert_eq!(
            by_characters, profile.h[1],
            "character count disagrees for p={p}, S={s:?}, T={t:?}"
        );
        assert!(
            excision_identity_holds(&s, &t, *p).unwrap(),
            "excision fails for p={p}, S={s:?}, T={t:?}"
        );
    }
    assert!(start.elapsed() < Duration::from_secs(60), "took {:?}", start.elapsed());
    println!("criterion 1: PASS — h1 character count and excision on 200 randomized curves");
}

// ---------------------------------------------------------------------
// Criterion 2: residue symbols against exhaustive power enumeration, tame
// below 500 and wild below p².
// ---------------------------------------------------------------------
#[test]
fn criterion_2_symbol_oracle() {
    use mildcurve::modarith::{linking_symbol, wild_unit_exponent, TamePrime};
    let start = Instant::now();
    for p in [3u64, 5, 7] {
        for q in tame_pool(p, 500) {
            let mut is_power = vec![false; q as usize];
            for x in 1..q {
                let mut acc = 1u64;
                for _ in 0..p {
                    acc = acc * x % q;
                }
                is_power[acc as usize] = true;
            }
            let place = TamePrime::new(q, p).unwrap();
            for a in 1..q {
                let symbol = linking_symbol(a, &place).unwrap();
                assert_eq!(
                    symbol.is_zero(),
                    is_power[a as usize],
                    "symbol mismatch at a={a}, q={q}, p={p}"
                );
            }
        }
        let p2 = p * p;
        let mut is_power = vec![false; p2 as usize];
        for x in 1..p2 {
            if x % p == 0 {
                continue;
            }
            let mut acc = 1u64;
            for _ in 0..p {
                acc = acc * x % p2;
            }
            is_power[acc as usize] = true;
        }
        for a in 1..p2 {
            if a % p == 0 {
                continue;
            }
            let wild = wild_unit_exponent(a, p).unwrap();
            assert_eq!(wild.is_zero(), is_power[a as usize], "wild mismatch at a={a}, p={p}");
        }
    }
    assert!(start.elapsed() < Duration::from_secs(30), "took {:?}", start.elapsed());
    println!(
        "criterion 2: PASS — tame symbols below 500 and wild exponents below p² match brute force"
    );
}

// ---------------------------------------------------------------------
// Criterion 3: Kummer group laws with an independent brute-force oracle.
// The oracle counts exponent vectors whose T-product satisfies the local
// p-th-power condition at every place, with no shared linear algebra.
// ---------------------------------------------------------------------
fn raw_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn brute_kummer_dim(s: &[u64], t: &[u64], p: u64) -> u32 {
    let mut exponents = vec![0u64; t.len()];
    let mut solutions = 0u64;
    loop {
        let mut ok = true;
        for &v in s {
            if v == p {
                // Local unit must be a p-th power mod p²: u^(p−1) ≡ 1.
                let mut val = 1u64;
                for (i, &gen) in t.iter().enumerate() {
                    val = val * raw_pow(gen, exponents[i], p * p) % (p * p);
                }
                if raw_pow(val, p - 1, p * p) != 1 {
                    ok = false;
                    break;
                }
            } else {
                let mut val = 1u64;
                for (i, &gen) in t.iter().enumerate() {
                    val = val * raw_pow(gen, exponents[i], v) % v;
                }
                let order_quotient = (v - 1) / gcd(p, v - 1);
                if raw_pow(val, order_quotient, v) != 1 {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            solutions += 1;
        }
        let mut i = 0;
        loop {
            if i == exponents.len() {
                let dim = solutions.ilog(p);
                assert_eq!(p.pow(dim), solutions, "solution count is not a p-power");
                return dim;
            }
            exponents[i] += 1;
            if exponents[i] < p {
                break;
            }
            exponents[i] = 0;
            i += 1;
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[test]
fn criterion_3_kummer_laws_and_oracle() {
    let small_primes = primes_below(50);
    for p in [3u64, 5, 7] {
        let tame: Vec<u64> = small_primes.iter().copied().filter(|&q| q % p == 1).collect();
        let redundant: Vec<u64> =
            small_primes.iter().copied().filter(|&q| q != p && q % p != 1).collect();
        let mut t_sets: Vec<Vec<u64>> = vec![vec![]];
        for (i, &a) in small_primes.iter().enumerate() {
            t_sets.push(vec![a]);
            for &b in &small_primes[i + 1..] {
                t_sets.push(vec![a, b]);
            }
        }
        for t in &t_sets {
            let empty = kummer_group(&[], t, p).unwrap().dim;
            assert_eq!(empty, t.len(), "dim V with no places must be |T|");
            assert_eq!(empty as u32, brute_kummer_dim(&[], t, p));
            for &q in tame.iter().filter(|q| !t.contains(q)) {
                let one = kummer_group(&[q], t, p).unwrap().dim;
                assert!(empty - one <= 1, "one tame place dropped dim by more than 1");
                assert_eq!(one as u32, brute_kummer_dim(&[q], t, p));
            }
            if let (Some(&q), Some(&r)) =
                (tame.iter().find(|q| !t.contains(q)), redundant.iter().find(|r| !t.contains(r)))
            {
                let with_tame = kummer_group(&[q], t, p).unwrap().dim;
                let with_noise = kummer_group(&[q, r], t, p).unwrap().dim;
                assert_eq!(with_tame, with_noise, "redundant place changed the dimension");
                assert_eq!(with_noise as u32, brute_kummer_dim(&[q, r], t, p));
                let noise_only = kummer_group(&[r], t, p).unwrap().dim;
                assert_eq!(noise_only, empty);
            }
        }
    }
    println!("criterion 3: PASS — Kummer laws and brute-force oracle on all |T| ≤ 2 sets below 50");
}

// ---------------------------------------------------------------------
// Criterion 4: the full pipeline through the CLI binary, three curves,
// each under ten seconds, all verdicts true, verification bit-exact.
// ---------------------------------------------------------------------
fn certify_via_cli(dir: &std::path::Path, name: &str, p: &str, s: &str, t: &str) -> Certificate {
    let exe = env!("CARGO_BIN_EXE_mildcurve");
    let cert_path = dir.join(name);
    let run = |path: &std::path::Path| {
        let started = Instant::now();
        let out = Command::new(exe)
            .args(["certify", "--p", p, "--S", s, "--T", t, "--avoid", "divisors-of-p", "--out"])
            .arg(path)
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "certify failed for p={p} S={s} T={t}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(started.elapsed() < Duration::from_secs(10), "took {:?}", started.elapsed());
        out.stdout
    };
    let first_stdout = run(&cert_path);
    let rerun_path = dir.join(format!("{name}.rerun"));
    let second_stdout = run(&rerun_path);
    assert_eq!(first_stdout, second_stdout, "certify stdout is not reproducible");
    let bytes = std::fs::read(&cert_path).unwrap();
    assert_eq!(bytes, std::fs::read(&rerun_path).unwrap(), "certificate bytes differ across runs");

    let verify_out = Command::new(exe).arg("verify").arg(&cert_path).output().expect("binary runs");
    assert!(verify_out.status.success(), "verify exited nonzero on a fresh certificate");
    assert_eq!(String::from_utf8_lossy(&verify_out.stdout), "valid=true\n");

    let cert = Certificate::from_json(&String::from_utf8(bytes).unwrap()).unwrap();
    let v = cert.verdicts;
    assert!(
        v.vdim_zero
            && v.shape_ok
            && v.vv_zero
            && v.rank_full
            && v.mild
            && v.cd2
            && v.kpi1
            && v.ramified_everywhere,
        "some verdict is false for p={p} S={s} T={t}: {v:?}"
    );
    // Bit-exactness of the verification pass: re-serializing the parsed
    // certificate reproduces the file, and library verification agrees.
    assert_eq!(cert.to_canonical_json().into_bytes(), std::fs::read(&cert_path).unwrap());
    assert!(verify(&cert).unwrap());
    cert
}

#[test]
fn criterion_4_end_to_end_pipeline() {
    let dir = std::env::temp_dir().join("mildcurve-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let first = certify_via_cli(&dir, "cert-p3-s13-t11.json", "3", "13", "11");
    assert_eq!(first.s0, vec![7, 19, 31, 37]);
    assert_eq!(first.q, vec![47_779, 84_967, 119_611, 117_319]);
    let second = certify_via_cli(&dir, "cert-p3-empty.json", "3", "", "");
    assert_eq!(second.s0, vec![7, 13]);
    let third = certify_via_cli(&dir, "cert-p5-s11.json", "5", "11", "");
    assert_eq!(third.s0, vec![31, 41, 61]);
    println!("criterion 4: PASS — three certified curves, verdicts all true, byte-stable");
}

// ---------------------------------------------------------------------
// Criterion 5: cup-matrix block shape on the criterion-4 curves plus 20
// randomized ones; the ramified-ramified block recomputes to zero; shape
// implies full rank.
// ---------------------------------------------------------------------
fn criterion4_configs() -> Vec<(u64, Vec<u64>, Vec<u64>)> {
    vec![(3, vec![13], vec![11]), (3, vec![], vec![]), (5, vec![11], vec![])]
}

fn randomized_configs(count: usize) -> Vec<(u64, Vec<u64>, Vec<u64>)> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let pool = tame_pool(3, 200);
    let t_pool = primes_below(50);
    (0..count)
        .map(|_| {
            let s_len = rng.gen_range(0..=1);
            let s = sample_distinct(&mut rng, &pool, s_len, &[]);
            let t_len = rng.gen_range(0..=1);
            let t = sample_distinct(&mut rng, &t_pool, t_len, &s);
            (3, s, t)
        })
        .collect()
}

#[test]
fn criterion_5_cup_matrix_shape() {
    let mut configs = criterion4_configs();
    configs.extend(randomized_configs(20));
    for (p, s, t) in configs {
        let cert =
            certify(p, &s, &t, &AvoidanceSet::divisors_of_p(), &SearchConfig::default()).unwrap();
        assert!(shape_check(&cert.cup), "block shape broken for p={p} S={s:?} T={t:?}");
        assert!(
            vv_block_zero(&cert.table).unwrap(),
            "ramified-ramified block nonzero for p={p} S={s:?} T={t:?}"
        );
        // Shape forces triangular structure: full rank must follow.
        assert_eq!(
            cert.cup.entries.rank(),
            2 * cert.cup.m,
            "shape holds but rank is deficient for p={p} S={s:?} T={t:?}"
        );
    }
    println!("criterion 5: PASS — block shape, zero V∪V block, and shape ⇒ full rank on 23 curves");
}

// ---------------------------------------------------------------------
// Criterion 6: switching every recorded primitive root to the second
// smallest flips no verdict.
// ---------------------------------------------------------------------
#[test]
fn criterion_6_root_normalization_invariance() {
    let mut configs = criterion4_configs();
    configs.extend(randomized_configs(5));
    for (p, s, t) in configs {
        let avoid = AvoidanceSet::divisors_of_p();
        let cfg = SearchConfig::default();
        let smallest = certify(p, &s, &t, &avoid, &cfg).unwrap();
        let second =
            certify_with_roots(p, &s, &t, &avoid, &cfg, RootChoice::SecondSmallest).unwrap();
        assert_ne!(smallest.table.roots, second.table.roots);
        assert_eq!(
            smallest.verdicts, second.verdicts,
            "a verdict flipped under root change for p={p} S={s:?} T={t:?}"
        );
        assert_eq!(smallest.claims, second.claims);
        assert!(verify(&second).unwrap());
    }
    println!("criterion 6: PASS — second-smallest roots flip no verdict on 8 curves");
}

// ---------------------------------------------------------------------
// Criterion 7: the known mild family {7, 19, 61, 163} for p = 3. The
// probe's verdict is compared against an independent re-evaluation that
// recomputes every symbol by brute-force discrete logs and redoes the
// rank check with local arithmetic only.
// ---------------------------------------------------------------------
fn raw_primitive_root(v: u64) -> u64 {
    'candidate: for g in 2..v {
        let mut seen = vec![false; v as usize];
        let mut x = 1u64;
        for _ in 0..v - 1 {
            x = x * g % v;
            if seen[x as usize] {
                continue 'candidate;
            }
            seen[x as usize] = true;
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

fn raw_symbol(a: u64, v: u64, p: u64) -> u64 {
    let g = raw_primitive_root(v);
    let target = raw_pow(a % v, (v - 1) / p, v);
    let base = raw_pow(g, (v - 1) / p, v);
    let mut cur = 1u64;
    for e in 0..p {
        if cur == target {
            return e;
        }
        cur = cur * base % v;
    }
    unreachable!("target lies in the subgroup of order p")
}

fn raw_rank_mod(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = raw_pow(rows[rank][c] % p, p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = *x % p * inv % p;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_multiple_of(p) {
                let f = row[c] % p;
                for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - f) * pv) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn criterion_7_known_mild_family_probe() {
    let places = [7u64, 19, 61, 163];
    let p = 3u64;
    let probe = mild_split_probe(&places, p).unwrap();

    // Independent evaluation from raw symbols only.
    let n = places.len();
    let sym: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            (0..n).map(|j| if i == j { 0 } else { raw_symbol(places[i], places[j], p) }).collect()
        })
        .collect();
    let split_works = |u_side: &[usize], v_side: &[usize]| -> bool {
        for (k, &x) in v_side.iter().enumerate() {
            for &y in &v_side[k + 1..] {
                if sym[x][y] != 0 || sym[y][x] != 0 {
                    return false;
                }
            }
        }
        let mut rows = Vec::new();
        for &u in u_side {
            for &v in v_side {
                let mut row = vec![0u64; n];
                row[u] = (p - sym[u][v]) % p;
                row[v] = sym[v][u];
                rows.push(row);
            }
        }
        raw_rank_mod(rows, p) == n
    };
    let mut any_split = false;
    for mask in 1u32..((1u32 << n) - 1) {
        let v_side: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let u_side: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        any_split |= split_works(&u_side, &v_side);
    }
    assert_eq!(probe.mild, any_split, "probe verdict disagrees with raw re-evaluation");
    if probe.mild {
        let to_idx = |list: &[u64]| -> Vec<usize> {
            list.iter().map(|q| places.iter().position(|x| x == q).unwrap()).collect()
        };
        let u_side = to_idx(&probe.u);
        let v_side = to_idx(&probe.v);
        assert!(split_works(&u_side, &v_side), "reported split fails the raw criteria");
    }
    println!(
        "criterion 7: PASS — probe verdict (mild={}) agrees with raw-symbol re-evaluation",
        probe.mild
    );
}

// ---------------------------------------------------------------------
// Criterion 8: removing redundant places never changes the profile, and
// the reduction is idempotent, on 100 randomized sets.
// ---------------------------------------------------------------------
#[test]
fn criterion_8_s_min_invariance() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let t_pool = primes_below(50);
    for case in 0..100 {
        let p = [3u64, 5, 7][case % 3];
        let tame = tame_pool(p, 1_000);
        let redundant: Vec<u64> =
            primes_below(1_000).into_iter().filter(|&q| q != p && q % p != 1).collect();
        let tame_len = rng.gen_range(0..=2);
        let mut s = sample_distinct(&mut rng, &tame, tame_len, &[]);
        let noise_len = rng.gen_range(1..=3);
        s.extend(sample_distinct(&mut rng, &redundant, noise_len, &[]));
        if rng.gen_bool(0.3) {
            s.push(p);
        }
        s.sort_unstable();
        s.dedup();
        let t_len = rng.gen_range(0..=1);
        let t = sample_distinct(&mut rng, &t_pool, t_len, &s);
        let reduced = s_min(&s, p);
        assert!(reduced.len() < s.len(), "test must actually drop redundant places");
        let full = global_profile(&s, &t, p).unwrap();
        let min = global_profile(&reduced, &t, p).unwrap();
        assert_eq!(
            (full.h, full.chi, full.theta, full.vdim),
            (min.h, min.chi, min.theta, min.vdim),
            "profile changed under s_min for p={p} S={s:?} T={t:?}"
        );
        assert_eq!(s_min(&reduced, p), reduced, "s_min is not idempotent");
    }
    println!("criterion 8: PASS — profiles invariant under s_min on 100 randomized sets");
}

// ---------------------------------------------------------------------
// Criterion 9: the enlargement criterion answers yes for a prime with
// nonzero Frobenius image and stays silent for one whose image vanishes.
// The probe primes were located by direct search below 10^7 and their
// defining property is re-checked here from raw symbols.
// ---------------------------------------------------------------------
// (p, S, T, prime with nonzero image, prime with vanishing image)
type EnlargementCase = (u64, Vec<u64>, Vec<u64>, u64, u64);

#[test]
fn criterion_9_enlargement() {
    let cases: Vec<EnlargementCase> = vec![
        (3, vec![13], vec![11], 43, 186_037),
        (3, vec![], vec![], 31, 3_541),
        (5, vec![11], vec![], 71, 2_993_981),
    ];
    for (p, s, t, good, silent) in cases {
        let cert =
            certify(p, &s, &t, &AvoidanceSet::divisors_of_p(), &SearchConfig::default()).unwrap();
        let yes = enlargement_check(&cert, &[good]).unwrap();
        assert_eq!(yes.outcome, EnlargementOutcome::SufficientYes, "p={p} prime {good}");
        assert!(yes.evaluations[0].image_nonzero && !yes.evaluations[0].in_certified_set);
        let no = enlargement_check(&cert, &[silent]).unwrap();
        assert_eq!(no.outcome, EnlargementOutcome::Inconclusive, "p={p} prime {silent}");
        assert!(!no.evaluations[0].image_nonzero);

        // Independent confirmation from raw symbols: the silent prime's
        // image must lie in the span of the marked-unit images (with no
        // marking this means it splits everywhere in the certified set),
        // and the good prime's must not. All certified places are tame
        // here, so the coordinates are plain residue symbols.
        let coords =
            |x: u64| -> Vec<u64> { cert.profile.s.iter().map(|&v| raw_symbol(x, v, p)).collect() };
        let unit_rows: Vec<Vec<u64>> = cert.t.iter().map(|&gen| coords(gen)).collect();
        let in_unit_span = |w: &[u64]| -> bool {
            let mut lambdas = vec![0u64; unit_rows.len()];
            loop {
                let mut combo = vec![0u64; w.len()];
                for (lambda, row) in lambdas.iter().zip(&unit_rows) {
                    for (c, x) in combo.iter_mut().zip(row) {
                        *c = (*c + lambda * x) % p;
                    }
                }
                if combo == w {
                    return true;
                }
                let mut i = 0;
                loop {
                    if i == lambdas.len() {
                        return false;
                    }
                    lambdas[i] += 1;
                    if lambdas[i] < p {
                        break;
                    }
                    lambdas[i] = 0;
                    i += 1;
                }
            }
        };
        assert!(in_unit_span(&coords(silent)), "silent prime is not actually silent");
        assert!(!in_unit_span(&coords(good)), "good prime does not actually separate");

        // Probing a marked prime is a usage error.
        if let Some(&marked) = cert.t.first() {
            assert!(enlargement_check(&cert, &[marked]).is_err());
        }
    }
    println!(
        "criterion 9: PASS — enlargement sufficient/inconclusive with raw-symbol confirmation"
    );
}
