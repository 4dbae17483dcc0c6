//! Acceptance run: one line per criterion, `[PASS]` or `[FAIL]`, each at its
//! stated tolerance. The process exits 0 so the workspace suite stays
//! usable while a criterion is known to be blocked; set
//! `ACCEPTANCE_STRICT=1` to exit 1 on any failure.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use planeaut::family::ParamFamily;
use planeaut::fixed::{fixed_set, FixedSet};
use planeaut::jung;
use planeaut::lab::{run_experiment, ExperimentConfig};
use planeaut::nilpotent::{
    commutator, conjugation, family_in_template, normalize_nilpotent_family, template_member, NilTemplate,
    NormalForm, NormalizeOptions,
};
use planeaut::separable::{match_separable, SeparableBounds};
use planeaut::word::random;
use planeaut::{AltWord, Field, PlaneMap, Scalar};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rational(rng: &mut ChaCha8Rng) -> Scalar {
    let q = Field::Rational;
    loop {
        let n = rng.gen_range(-9i64..=9);
        let d = rng.gen_range(1i64..=5);
        if n != 0 {
            return &q.from_i64(n) * &q.from_i64(d).inv().unwrap();
        }
    }
}

fn small(rng: &mut ChaCha8Rng, field: Field, nonzero: bool) -> Scalar {
    loop {
        let v = field.from_i64(rng.gen_range(-5..=5));
        if !nonzero || !v.is_zero() {
            return v;
        }
    }
}

/// `c0 + c1*y + ...` in the polynomial grammar.
fn poly_text(coeffs: &[Scalar], var: &str) -> String {
    let mut s = String::from("0");
    for (i, c) in coeffs.iter().enumerate() {
        s.push_str(&format!(" + ({c})*({var})^{i}"));
    }
    s
}

fn symbolic(name: char) -> String {
    (0..=5).map(|i| format!(" + {name}{i}*y^{i}")).collect::<String>()
}

fn symbolic_at(name: char, arg: &str) -> String {
    (0..=5).map(|i| format!(" + {name}{i}*({arg})^{i}")).collect::<String>()
}

fn decomposition_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut total, mut good) = (0, 0);
    let mut first_bad = None;
    for field in [Field::Rational, Field::Prime(10007)] {
        for _ in 0..500 {
            let len = rng.gen_range(0..=6);
            let w = random::word(&mut rng, field, len, 5);
            let noisy = AltWord::new(field, random::shuffle(&mut rng, &w)).expect("noise keeps letters in place");
            total += 1;
            let ok = noisy.canonicalize() == w.canonicalize()
                && jung::decompose(&noisy.multiply_out()).is_ok_and(|d| d.canonicalize() == w.canonicalize());
            if ok {
                good += 1;
            } else if first_bad.is_none() {
                first_bad = Some(w.to_string());
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = good == total && elapsed < Duration::from_secs(60);
    let mut detail = format!("{good}/{total} words letter-exact, {:.1} s (limit 60 s)", elapsed.as_secs_f64());
    if let Some(w) = first_bad {
        detail.push_str(&format!("; first mismatch {w}"));
    }
    outcome(pass, detail)
}

fn non_automorphisms(rng: &mut ChaCha8Rng) -> Vec<PlaneMap> {
    let q = Field::Rational;
    let mut out: Vec<PlaneMap> = [
        "(x^2, y)",
        "(x, x*y)",
        "(x^3 + y, y)",
        "(x + y^2, x + y^2)",
        "(x*y + 1, y)",
        "(x^2 + y^2, x - y)",
        "(0, y)",
        "(x, 0)",
        "(x + x^2*y, y + x*y^2)",
        "(y^2 + x^2, 2*x*y)",
    ]
    .iter()
    .map(|t| PlaneMap::parse(t, q).unwrap())
    .collect();
    // singular affines: proportional rows
    while out.len() < 25 {
        let (a, b, k) = (small(rng, q, false), small(rng, q, false), small(rng, q, false));
        let (c, d) = (small(rng, q, false), small(rng, q, false));
        let ka = &k * &a;
        let kb = &k * &b;
        out.push(PlaneMap::parse(&format!("(({a})*x + ({b})*y + ({c}), ({ka})*x + ({kb})*y + ({d}))"), q).unwrap());
    }
    // leading forms y^d1 and x^d2 that are not powers of each other
    while out.len() < 50 {
        let (d1, d2) = (rng.gen_range(2..=5), rng.gen_range(2..=5));
        let (alpha, beta) = (small(rng, q, true), small(rng, q, true));
        let (u, v) = (small(rng, q, false), small(rng, q, false));
        out.push(
            PlaneMap::parse(
                &format!("(x + ({alpha})*y^{d1} + ({u})*y, y + ({beta})*x^{d2} + ({v})*x)"),
                q,
            )
            .unwrap(),
        );
    }
    out
}

fn automorphism_decision() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut accepted = 0;
    let mut words = 0;
    let mut oracle_ok = true;
    for field in [Field::Rational, Field::Prime(10007)] {
        for _ in 0..150 {
            let len = rng.gen_range(0..=6);
            let f = random::word(&mut rng, field, len, 5).multiply_out();
            words += 1;
            if jung::is_automorphism(&f) {
                accepted += 1;
            }
            if field == Field::Rational {
                let j = f.jacobian_det();
                oracle_ok &= j.is_constant() && !j.is_zero();
            }
        }
    }
    let corpus = non_automorphisms(&mut rng);
    let rejected = corpus.iter().filter(|f| !jung::is_automorphism(f)).count();
    // an automorphism has a nonzero constant Jacobian
    let oracle_rejects = corpus
        .iter()
        .filter(|f| {
            let j = f.jacobian_det();
            !j.is_constant() || j.is_zero()
        })
        .count();
    let pass = accepted == words && rejected == corpus.len() && oracle_rejects == corpus.len() && oracle_ok;
    outcome(
        pass,
        format!(
            "accepted {accepted}/{words} words, rejected {rejected}/{} non-automorphisms, Jacobian oracle agrees on {oracle_rejects}/{}",
            corpus.len(),
            corpus.len()
        ),
    )
}

fn formula_suite() -> Outcome {
    let q = Field::Rational;
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let params: Vec<String> = (0..=5).map(|i| format!("p{i}")).chain((0..=5).map(|i| format!("q{i}"))).collect();
    let fam = |text: &str| ParamFamily::parse(text, q, &params).unwrap();
    let (p, qq) = (symbolic('p'), symbolic('q'));
    let mut passed = [0usize; 3];
    for _ in 0..100 {
        let (a, a2, b, c, d) = (rational(&mut rng), rational(&mut rng), rational(&mut rng), rational(&mut rng), rational(&mut rng));
        let one = q.one();

        // [ax + P, a'x + Q] = x + (aa')⁻¹((a-1)Q - (a'-1)P)
        let phi = fam(&format!("(({a})*x{p}, y)"));
        let psi = fam(&format!("(({a2})*x{qq}, y)"));
        let k = (&a * &a2).inv().unwrap();
        let (c1, c2) = (&k * &(&a - &one), &k * &(&a2 - &one));
        let expected = fam(&format!("(x + ({c1})*(0{qq}) - ({c2})*(0{p}), y)"));
        if commutator(&phi, &psi).is_ok_and(|r| r == expected) {
            passed[0] += 1;
        }

        // [x + P, (b^ℓ x + Q, by)] = x + b^{-ℓ}P(by) - P(y)
        let ell = rng.gen_range(0..=5u32);
        let bl = b.pow(ell);
        let phi = fam(&format!("(x{p}, y)"));
        let psi = fam(&format!("(({bl})*x{qq}, ({b})*y)"));
        let bli = bl.inv().unwrap();
        let by = format!("({b})*y");
        let expected = fam(&format!("(x + ({bli})*(0{}) - (0{p}), y)", symbolic_at('p', &by)));
        if commutator(&phi, &psi).is_ok_and(|r| r == expected) {
            passed[1] += 1;
        }

        // (a'x, y)^(ax + P, cy + d) = (a'x + a⁻¹(a'-1)P, y)
        let phi = fam(&format!("(({a})*x{p}, ({c})*y + ({d}))"));
        let psi = fam(&format!("(({a2})*x, y)"));
        let k = &a.inv().unwrap() * &(&a2 - &one);
        let expected = fam(&format!("(({a2})*x + ({k})*(0{p}), y)"));
        if conjugation(&psi, &phi).is_ok_and(|r| r == expected) {
            passed[2] += 1;
        }
    }
    outcome(
        passed.iter().all(|&n| n == 100),
        format!(
            "symbolic P, Q of degree 5: {}/100, {}/100, {}/100 instances exact",
            passed[0], passed[1], passed[2]
        ),
    )
}

fn random_member(rng: &mut ChaCha8Rng, t: NilTemplate) -> PlaneMap {
    let q = Field::Rational;
    let text = match t {
        NilTemplate::T1 => format!("(({})*x, ({})*y)", rational(rng), rational(rng)),
        NilTemplate::T2 => format!("(({})*x, y + ({}))", rational(rng), rational(rng)),
        NilTemplate::T3 { ell } => {
            let b = rational(rng);
            format!("(({})*x + ({})*y^{ell}, ({b})*y)", b.pow(ell), rational(rng))
        }
        NilTemplate::T4 { n } => {
            let coeffs: Vec<Scalar> = (0..=n).map(|_| rational(rng)).collect();
            format!("(x + {}, y + ({}))", poly_text(&coeffs, "y"), rational(rng))
        }
    };
    PlaneMap::parse(&text, q).unwrap()
}

fn template_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut failures = Vec::new();
    for i in 0..200 {
        let t = match rng.gen_range(0..4) {
            0 => NilTemplate::T1,
            1 => NilTemplate::T2,
            2 => NilTemplate::T3 { ell: rng.gen_range(0..=4) },
            _ => NilTemplate::T4 { n: rng.gen_range(0..=4) },
        };
        let g = random_member(&mut rng, t);
        let h = random_member(&mut rng, t);
        let mut ok = template_member(&g.compose(&h), t)
            && jung::invert(&g).is_ok_and(|gi| template_member(&gi, t) && gi.compose(&g).is_identity());
        match t {
            NilTemplate::T4 { n } => {
                let mut c = g.clone();
                for step in 1..=n + 1 {
                    c = commutator(&c, &random_member(&mut rng, t)).unwrap();
                    if step <= n {
                        ok &= template_member(&c, t);
                    }
                }
                ok &= c.is_identity();
            }
            _ => ok &= g.compose(&h) == h.compose(&g),
        }
        if !ok {
            failures.push(format!("#{i} {t}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{}/200 instances (closure, inverses, abelian T1-T3, T4(n) nilpotent in n+1 steps){}", 200 - failures.len(),
            if failures.is_empty() { String::new() } else { format!("; failed {}", failures.join(", ")) }),
    )
}

fn fixed_candidates(rng: &mut ChaCha8Rng, field: Field) -> PlaneMap {
    let parse = |t: String| PlaneMap::parse(&t, field).unwrap();
    match rng.gen_range(0..6) {
        // horizontal fixed lines
        0 => {
            let (r1, r2, k) = (small(rng, field, false), small(rng, field, false), small(rng, field, true));
            parse(format!("(x + ({k})*(y - ({r1}))*(y - ({r2})), y)"))
        }
        // fixed graph x = P(y)/(1 - a)
        1 => {
            let a = loop {
                let a = small(rng, field, true);
                if !a.is_one() {
                    break a;
                }
            };
            let coeffs: Vec<Scalar> = (0..3).map(|_| small(rng, field, false)).collect();
            parse(format!("(({a})*x + {}, y)", poly_text(&coeffs, "y")))
        }
        // a fixed curve moved by an affine change of coordinates
        2 => {
            let (r, k) = (small(rng, field, false), small(rng, field, true));
            let e = parse(format!("(x + ({k})*(y - ({r}))^2, y)"));
            let h = random::affine(rng, field);
            let hi = jung::invert(&h).unwrap();
            hi.compose(&e).compose(&h)
        }
        3 => {
            if rng.gen_bool(0.3) {
                PlaneMap::identity(field)
            } else {
                let c = small(rng, field, true);
                parse(format!("(x + ({c}), y)"))
            }
        }
        _ => {
            let len = rng.gen_range(1..=3);
            random::word(rng, field, len, 3).multiply_out()
        }
    }
}

fn fixed_set_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut total, mut good) = (0, 0);
    let mut first_bad = None;
    for p in [11u64, 31, 101] {
        let field = Field::Prime(p);
        let elems: Vec<Scalar> = (0..p as i64).map(|v| field.from_i64(v)).collect();
        for _ in 0..100 {
            let g = fixed_candidates(&mut rng, field);
            let s = fixed_set(&g);
            let mut scan = HashSet::new();
            let mut agree = true;
            for x in &elems {
                for y in &elems {
                    let pt = [x.clone(), y.clone()];
                    let fixed = g.apply(&pt) == pt;
                    if fixed {
                        scan.insert(pt.clone());
                    }
                    agree &= s.contains(&pt) == fixed;
                }
            }
            agree &= match &s {
                FixedSet::WholePlane => scan.len() as u64 == p * p,
                FixedSet::Finite { points, .. } => points.len() == scan.len(),
                FixedSet::InfiniteCurve { components, .. } => !components.is_empty(),
            };
            total += 1;
            if agree {
                good += 1;
            } else if first_bad.is_none() {
                first_bad = Some(format!("{g} over F_{p}"));
            }
        }
    }
    let mut detail = format!("{good}/{total} maps agree with the exhaustive scan over F_11, F_31, F_101");
    if let Some(b) = first_bad {
        detail.push_str(&format!("; first mismatch {b}"));
    }
    outcome(good == total, detail)
}

fn normal_form_recovery() -> Outcome {
    let q = Field::Rational;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let trials = 60;
    let (mut found, mut false_positive) = (0, 0);
    for i in 0..trials {
        let ell = i % 4;
        let deg = rng.gen_range(1..=3u32);
        let mut alpha: Vec<Scalar> = (0..=deg).map(|_| small(&mut rng, q, false)).collect();
        alpha[deg as usize] = small(&mut rng, q, true);
        let xi = PlaneMap::parse(&format!("(x + {}, y)", poly_text(&alpha, "y")), q).unwrap();
        let xi_inv = jung::invert(&xi).unwrap();
        let n_ell = ParamFamily::parse(&format!("(t^{ell}*x + u*y^{ell}, t*y)"), q, &["t", "u"]).unwrap();
        // ξ⁻¹ N_ℓ ξ
        let family = n_ell.pre(&xi_inv).post(&xi);
        let n = family.degree().unwrap_or(1).max(1);
        let opts = NormalizeOptions { samples: 6, seed: i as u64 };
        if let Ok(NormalForm::Found { template, pre, post }) = normalize_nilpotent_family(&family, n, &opts) {
            let normal = family.pre(&pre).post(&post);
            let inverse_pair = jung::invert(&pre).is_ok() && jung::invert(&post).is_ok();
            if family_in_template(normal.gx(), normal.gy(), template) && inverse_pair {
                found += 1;
            } else {
                false_positive += 1;
            }
        }
    }
    let rate = found as f64 / trials as f64;
    outcome(
        rate >= 0.9 && false_positive == 0,
        format!("recovered {found}/{trials} ({:.0}%, need 90%), {false_positive} unverified witnesses", rate * 100.0),
    )
}

const TRANSLATIONS: &str = r#"
prime = 10007
seed = 7

[family]
expr = "(x + b, y + b)"
params = ["b"]

[b]
ranges = [[0, 63]]

[a]
grid = [[0, 63], [0, 63]]
"#;

const HENON: &str = r#"
prime = 10007
seed = 7

[family]
expr = "(y, y^2 + x + b)"
params = ["b"]

[b]
random = 64

[a]
grid = [[0, 63], [0, 63]]
"#;

fn expansion_dichotomy() -> Vec<(&'static str, &'static str, Outcome)> {
    let start = Instant::now();
    let trans = run_experiment(&ExperimentConfig::from_toml(TRANSLATIONS).unwrap()).unwrap();
    let henon = run_experiment(&ExperimentConfig::from_toml(HENON).unwrap()).unwrap();
    let elapsed = start.elapsed();
    let brute: HashSet<(u64, u64)> = (0..64u64)
        .flat_map(|b| (0..64u64).flat_map(move |x| (0..64u64).map(move |y| (x + b, y + b))))
        .collect();
    let a = trans.a_size as u64;
    let within_time = elapsed < Duration::from_secs(300);
    let a_out = outcome(
        trans.image_size == brute.len() as u64 && trans.image_size <= 4 * a && within_time,
        format!(
            "|F*A| = {} (enumeration {}), bound 4|A| = {}, exponent {:.4}",
            trans.image_size,
            brute.len(),
            4 * a,
            trans.exponent
        ),
    );
    let gap = henon.exponent - trans.exponent;
    let b_out = outcome(
        gap >= 0.10 && within_time,
        format!(
            "exponent {:.4} vs {:.4}, gap {:.4} (need 0.10); |F*A| = {}",
            henon.exponent, trans.exponent, gap, henon.image_size
        ),
    );
    let te = trans.eps.as_ref().map_or(0.0, |e| e.fraction);
    let he = henon.eps.as_ref().map_or(1.0, |e| e.fraction);
    let c_out = outcome(
        te == 1.0 && he <= 0.25 && within_time,
        format!(
            "translations {:.4} ({}), Henon {:.4} ({}), need 1.0 and <= 0.25; {:.1} s total (limit 300 s)",
            te,
            trans.eps.as_ref().map_or("-".into(), |e| e.template.to_string()),
            he,
            henon.eps.as_ref().map_or("-".into(), |e| e.template.to_string()),
            elapsed.as_secs_f64()
        ),
    );
    vec![
        ("7a", "translations stay within 4|A|", a_out),
        ("7b", "Henon family expands further", b_out),
        ("7c", "coset fractions", c_out),
    ]
}

fn determinism() -> Outcome {
    let mut checks = Vec::new();
    for text in [TRANSLATIONS, HENON] {
        let mut cfg = ExperimentConfig::from_toml(text).unwrap();
        cfg.workers = 1;
        let one = run_experiment(&cfg).unwrap().to_json();
        let again = run_experiment(&cfg).unwrap().to_json();
        cfg.workers = 4;
        cfg.spill_threshold = 10_000;
        let four = run_experiment(&cfg).unwrap().to_json();
        checks.push(one == again && one == four);
    }
    let q = Field::Rational;
    let fam = ParamFamily::parse("(t*x + (t - 4)*(y - 1)^2, 2*y - 1)", q, &["t"]).unwrap();
    let opts = NormalizeOptions { samples: 6, seed: 9 };
    let nf = || serde_json::to_string(&normalize_nilpotent_family(&fam, 2, &opts).unwrap()).unwrap();
    checks.push(nf() == nf());
    let henon = ParamFamily::parse("(y, y^2 + x + t)", q, &["t"]).unwrap();
    let bounds = SeparableBounds { seed: 9, ..SeparableBounds::default() };
    let ms = || serde_json::to_string(&match_separable(&henon, &bounds).unwrap()).unwrap();
    checks.push(ms() == ms());
    let n = checks.iter().filter(|&&c| c).count();
    outcome(
        n == checks.len(),
        format!("{n}/{} pipelines byte-identical (two runs; 1 vs 4 workers for the lab)", checks.len()),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        }
    }
}

fn main() {
    let mut results: Vec<(&str, &str, Outcome)> = vec![
        ("1", "decomposition round trip", guarded(decomposition_round_trip)),
        ("2", "automorphism decision", guarded(automorphism_decision)),
        ("3", "commutator and conjugation formulas", guarded(formula_suite)),
        ("4", "template group laws", guarded(template_laws)),
        ("5", "fixed sets against exhaustive scan", guarded(fixed_set_oracle)),
        ("6", "normal form recovery", guarded(normal_form_recovery)),
    ];
    match catch_unwind(expansion_dichotomy) {
        Ok(rows) => results.extend(rows),
        Err(_) => results.push(("7", "expansion dichotomy", outcome(false, "panicked"))),
    }
    results.push(("8", "determinism", guarded(determinism)));

    let mut failed = Vec::new();
    for (id, title, o) in &results {
        println!("[{}] {id} {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(*id);
        }
    }
    println!(
        "{}/{} criteria passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    if !failed.is_empty() && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
