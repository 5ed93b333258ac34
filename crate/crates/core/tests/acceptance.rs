use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use msou_core::codec::{decode_tree_sequence, encode_tree_sequence, Node, TreeSeq};
use msou_core::eval::{all_words, EvalBudget};
use msou_core::logic::{analyze, render_formula, Alphabet};
use msou_core::minsky::{
    describe_run, find_accepting_run, parse_machine, validate_description, MinskyMachine, Op, RunDescription,
};
use msou_core::reduction::{check_conditions, machine_to_formula, witness_tree_sequence, BlockPredicates, WitnessParams};
use msou_core::vecseq::{
    identity_grid_window, min_dominate, refute_projections, select, window_equiv, EquivParams, NumberWindow,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Asymptotic-equivalence transfer at window scale: small on one side forces
/// at most `b_prime` on the other.
fn transfers(x: u64, y: u64, b: u64, b_prime: u64) -> bool {
    (x > b || y <= b_prime) && (y > b || x <= b_prime)
}

fn machine(text: &str) -> MinskyMachine {
    parse_machine(text).expect("fixture parses")
}

// ---------------------------------------------------------------- 1

fn random_node(rng: &mut ChaCha8Rng, depth: usize, n: usize) -> Node {
    if depth == n {
        return Node::leaf();
    }
    let k = rng.gen_range(1..=3);
    Node::with_children((0..k).map(|_| random_node(rng, depth + 1, n)).collect())
}

fn random_tree_seq(rng: &mut ChaCha8Rng) -> TreeSeq {
    loop {
        let n = rng.gen_range(2..=4);
        let trees: Vec<Node> = (0..rng.gen_range(1..=4)).map(|_| random_node(rng, 1, n)).collect();
        if trees.iter().map(Node::leaf_count).sum::<usize>() <= 25 {
            return TreeSeq::new(n, trees).expect("uniform depth");
        }
    }
}

fn codec_exactness() -> Outcome {
    let mut violations = 0usize;
    let mut words = 0usize;
    for w in all_words(Alphabet::new(3).unwrap(), 8) {
        let l = w.letters();
        if l.first() != Some(&1) || !l.contains(&3) {
            continue;
        }
        words += 1;
        let t = decode_tree_sequence(&w).expect("decodable");
        let leaves: Vec<usize> = (0..l.len()).filter(|&i| l[i] == 3).collect();
        if t.leaf_positions() != Some(&leaves[..]) {
            violations += 1;
            continue;
        }
        let paths = t.leaf_paths();
        for a in 0..leaves.len() {
            for b in a + 1..leaves.len() {
                for i in 1..3usize {
                    let by_word = l[leaves[a] + 1..leaves[b]].iter().all(|&x| x as usize > i);
                    let by_tree = paths[a][..i] == paths[b][..i];
                    if by_word != by_tree {
                        violations += 1;
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let t = random_tree_seq(&mut rng);
        let back = decode_tree_sequence(&encode_tree_sequence(&t)).map(|d| d.unpositioned());
        if back.as_ref() != Ok(&t) {
            mismatches += 1;
        }
    }
    outcome(
        violations == 0 && mismatches == 0,
        format!("{words} words, {violations} rule violations; 1000 random sequences, {mismatches} round-trip mismatches"),
    )
}

// ---------------------------------------------------------------- 2

fn block_equivalence() -> Outcome {
    let blocks = BlockPredicates::standard();
    let budget = EvalBudget::new(2);
    let mut disagreements = 0usize;
    let mut errors = Vec::new();
    let mut with_u = 0;
    for b in blocks.iter() {
        if b.formula.contains_unbounded() {
            with_u += 1;
        }
        match b.check(8, &budget) {
            Ok(d) => disagreements += d.len(),
            Err(e) => errors.push(format!("{}: {e}", b.name)),
        }
    }
    outcome(
        disagreements == 0 && errors.is_empty() && with_u == 0,
        format!("{} blocks, {disagreements} disagreements, {} errors, {with_u} with U", blocks.len(), errors.len()),
    )
}

// ---------------------------------------------------------------- 3

const WITH_RUNS: [&str; 6] = [
    "states: q0 q1 q2 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q1\ntrans: q1 inc1 q2\ntrans: q2 zero2 qf\n",
    "states: q\ninit: q\nfinal: q\n",
    "states: q0 q1 q2 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q1\ntrans: q1 dec1 q2\ntrans: q2 zero1 qf\n",
    "states: q0 q1 q2 q3 qf\ninit: q0\nfinal: qf\ntrans: q0 inc2 q1\ntrans: q1 inc2 q2\ntrans: q2 dec2 q3\ntrans: q3 inc1 qf\n",
    "states: q0 q1 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q0\ntrans: q0 inc2 q1\ntrans: q1 zero1 qf\n",
    "states: q0 q1 q2 q3 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q1\ntrans: q1 inc1 q2\ntrans: q2 dec1 q3\ntrans: q3 inc2 q2\ntrans: q2 zero1 qf\n",
];

fn flags(r: &msou_core::reduction::Report) -> [bool; 4] {
    [r.a, r.b, r.c, r.d]
}

fn leaf_node(g: usize) -> Node {
    Node::with_children(vec![Node::leaf(); g])
}

fn witness_soundness() -> Outcome {
    let mut failures = Vec::new();
    let mut checks = 0;
    for (mi, text) in WITH_RUNS.iter().enumerate() {
        let m = machine(text);
        let Some(r) = find_accepting_run(&m, 10, 6) else {
            failures.push(format!("machine {mi}: no run"));
            continue;
        };
        let v = describe_run(&r);
        for trees in [5, 10, 20] {
            let t = witness_tree_sequence(&WitnessParams::new(v.clone(), trees).unwrap());
            let decoded = decode_tree_sequence(&encode_tree_sequence(&t)).unwrap();
            for (label, seq) in [("full", decoded.clone()), ("complete", decoded.complete_trees())] {
                for k in [0, 1] {
                    checks += 1;
                    let rep = check_conditions(&seq, &m, k).unwrap();
                    if !rep.all() || rep.description != v {
                        failures.push(format!("machine {mi}, T={trees}, {label}, prefix {k}: {:?}", flags(&rep)));
                    }
                }
            }

            // One corrupted degree per mutation, with the single condition it must break.
            let base = t.trees().to_vec();
            let last = trees - 1;
            let mut mutants: Vec<(&str, Vec<Node>, usize)> = Vec::new();

            let mut a = base.clone();
            a[0].children[0].children[0] = leaf_node(trees + 5);
            mutants.push(("depth-3 in first tree", a, 0));

            let mut b = base.clone();
            b[last].children.push(Node::with_children(vec![leaf_node(trees + 1)]));
            mutants.push(("root in last tree", b, 1));

            let mut c = base.clone();
            c[last].children[0].children.push(leaf_node(trees + 1));
            mutants.push(("depth-2 in last tree", c, 2));

            let mut bad = v.clone();
            bad.0[0] += 1;
            let d = witness_tree_sequence(&WitnessParams::new(bad, trees).unwrap()).trees().to_vec();
            mutants.push(("description entry", d, 3));

            for (name, mutated, expected) in mutants {
                checks += 1;
                let rep = check_conditions(&TreeSeq::new(4, mutated).unwrap(), &m, 0).unwrap();
                let got = flags(&rep);
                let want: [bool; 4] = std::array::from_fn(|i| i != expected);
                if got != want {
                    failures.push(format!("machine {mi}, T={trees}, {name}: {got:?}"));
                }
            }
        }
    }
    let detail = format!("{} machines, {checks} checks, {} failures", WITH_RUNS.len(), failures.len());
    if !failures.is_empty() {
        eprintln!("{}", failures.join("\n"));
    }
    outcome(failures.is_empty(), detail)
}

// ---------------------------------------------------------------- 4

const WITHOUT_RUNS: [&str; 4] = [
    "states: q0 q1 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q1\ntrans: q1 dec1 q0\n",
    "states: q0 qf\ninit: q0\nfinal: qf\ntrans: q0 dec1 qf\n",
    "states: q0 q1 q2 q3 q4 q5 q6 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q1\ntrans: q1 inc1 q2\ntrans: q2 inc1 q3\ntrans: q3 inc1 q4\ntrans: q4 inc1 q5\ntrans: q5 inc1 q6\ntrans: q6 zero2 qf\n",
    "states: q0 q1 qf\ninit: q0\nfinal: qf\ntrans: q0 inc1 q1\ntrans: q1 zero1 qf\n",
];

/// Counts descriptions of length `len` with entries at most `max` that
/// `validate_description` accepts.
fn accepted_descriptions(m: &MinskyMachine, len: usize, max: u64) -> u64 {
    let base = max + 1;
    let head_len = len.min(4);
    let heads = base.pow(head_len as u32);
    let tail_len = len - head_len;
    (0..heads)
        .into_par_iter()
        .map(|h| {
            let mut v = vec![0u64; len];
            let mut x = h;
            for slot in v[..head_len].iter_mut().rev() {
                *slot = x % base;
                x /= base;
            }
            let mut desc = RunDescription(v);
            let mut accepted = 0;
            loop {
                if validate_description(m, &desc) {
                    accepted += 1;
                }
                let tail = &mut desc.0[head_len..];
                let mut i = tail_len;
                loop {
                    if i == 0 {
                        return accepted;
                    }
                    i -= 1;
                    if tail[i] < max {
                        tail[i] += 1;
                        break;
                    }
                    tail[i] = 0;
                }
            }
        })
        .sum()
}

fn refutation_at_bound() -> Outcome {
    let mut accepted = 0;
    let mut bfs_found = 0;
    let mut total = 0u64;
    for text in WITHOUT_RUNS {
        let m = machine(text);
        if find_accepting_run(&m, 6, 4).is_some() {
            bfs_found += 1;
        }
        for len in (2..=12).step_by(2) {
            accepted += accepted_descriptions(&m, len, 4);
            total += 5u64.pow(len as u32);
        }
    }
    outcome(
        accepted == 0 && bfs_found == 0,
        format!("{} machines, {total} descriptions, {accepted} accepted, {bfs_found} runs within bounds", WITHOUT_RUNS.len()),
    )
}

// ---------------------------------------------------------------- 5

fn projection_refutation() -> Outcome {
    let (b, b_prime) = (5, 10);
    let p = EquivParams::new(b, b_prime).unwrap();
    let mut detail = Vec::new();
    let mut pass = true;
    for s in [3usize, 4] {
        let f = identity_grid_window(2, s).unwrap().scaled(b_prime + 1);
        let results = match refute_projections(&f, p, 1 << 20) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("s={s}: {e}")),
        };
        let mut refuted = 0;
        for r in &results {
            let Some(cx) = &r.counterexample else { continue };
            // Independent confirmation: the selection differs from the only
            // candidate selection at some position beyond the transfer bounds.
            let fx = select(&f, cx).unwrap();
            let gx = select(&f, &r.projection).unwrap();
            let broken = fx.values().iter().zip(gx.values()).any(|(&x, &y)| !transfers(x, y, b, b_prime));
            if broken {
                refuted += 1;
            }
        }
        pass &= refuted == results.len();
        detail.push(format!("s={s}: {refuted}/{} projections refuted", results.len()));
    }
    outcome(pass, detail.join(", "))
}

// ---------------------------------------------------------------- 6

fn min_construction() -> Outcome {
    let (b, b_prime) = (4u64, 12u64);
    let p = EquivParams::new(b, b_prime).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(1..=20);
        let h: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=30)).collect();
        // Wherever h exceeds B', f must exceed B.
        let f: Vec<u64> =
            h.iter().map(|&x| if x > b_prime { rng.gen_range(b + 1..=30) } else { rng.gen_range(0..=30) }).collect();
        let hw = NumberWindow::new(h.clone()).unwrap();
        let fw = NumberWindow::new(f.clone()).unwrap();
        let g = min_dominate(&hw, &fw).unwrap();
        let expected: Vec<u64> = h.iter().zip(&f).map(|(&x, &y)| x.min(y)).collect();
        let le_f = g.values().iter().zip(&f).all(|(x, y)| x <= y);
        let lib_equiv = window_equiv(&g, &hw, p).unwrap();
        let own_equiv = g.values().iter().zip(&h).all(|(&x, &y)| transfers(x, y, b, b_prime));
        if g.values() != &expected[..] || !le_f || !lib_equiv || !own_equiv {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("1000 cases, {failures} failures"))
}

// ---------------------------------------------------------------- 7

fn random_machine(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(2..=5);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut text = format!("states: {}\ninit: s0\nfinal: s{}\n", states.join(" "), n - 1);
    for _ in 0..rng.gen_range(0..=8) {
        let op = Op::ALL.choose(rng).unwrap();
        text.push_str(&format!(
            "trans: {} {} {}\n",
            states.choose(rng).unwrap(),
            op.name(),
            states.choose(rng).unwrap()
        ));
    }
    text
}

fn minsky_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut found, mut failures, mut tried) = (0, 0, 0);
    while found < 100 && tried < 100_000 {
        tried += 1;
        let m = machine(&random_machine(&mut rng));
        let Some(r) = find_accepting_run(&m, 10, 6) else { continue };
        found += 1;
        if !r.is_accepting(&m) || !validate_description(&m, &describe_run(&r)) {
            failures += 1;
        }
    }
    outcome(found == 100 && failures == 0, format!("{found} machines with runs ({tried} sampled), {failures} failures"))
}

// ---------------------------------------------------------------- 8

fn machine_with_transitions(k: usize) -> String {
    let states = ["q0", "q1", "q2", "qf"];
    let mut text = format!("states: {}\ninit: q0\nfinal: qf\n", states.join(" "));
    for i in 0..k {
        let op = Op::ALL[i % Op::ALL.len()];
        text.push_str(&format!("trans: {} {} {}\n", states[i % 4], op.name(), states[(i + 1) % 4]));
    }
    text
}

fn compiler_scaling() -> Outcome {
    let mut identical = true;
    let mut sizes = Vec::new();
    for k in [3usize, 6, 12] {
        let text = machine_with_transitions(k);
        let first = render_formula(&machine_to_formula(&machine(&text)));
        let second = render_formula(&machine_to_formula(&machine(&text)));
        identical &= first == second;
        sizes.push((k as i64, analyze(&machine_to_formula(&machine(&text))).size as i64));
    }
    let slope_num = sizes[1].1 - sizes[0].1;
    let slope_den = sizes[1].0 - sizes[0].0;
    let intercept = sizes[0].1 * slope_den - slope_num * sizes[0].0;
    let residual = sizes[2].1 * slope_den - (slope_num * sizes[2].0 + intercept);
    outcome(
        identical && residual == 0,
        format!(
            "deterministic: {identical}; sizes {:?}; slope {}/transition, residual {residual}",
            sizes.iter().map(|s| s.1).collect::<Vec<_>>(),
            slope_num as f64 / slope_den as f64
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 8] = [
        ("1 codec exactness", codec_exactness, Some(Duration::from_secs(60))),
        ("2 building-block equivalence", block_equivalence, Some(Duration::from_secs(600))),
        ("3 witness soundness and mutations", witness_soundness, Some(Duration::from_secs(60))),
        ("4 refutation at bound", refutation_at_bound, Some(Duration::from_secs(300))),
        ("5 projection refutation, d=2", projection_refutation, Some(Duration::from_secs(120))),
        ("6 min construction", min_construction, Some(Duration::from_secs(10))),
        ("7 minsky round trip", minsky_round_trip, Some(Duration::from_secs(60))),
        ("8 compiler determinism and scaling", compiler_scaling, None),
    ];
    let mut all = true;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = o.pass && in_time;
        all &= pass;
        let limit = limit.map_or("none".to_string(), |l| format!("{}s", l.as_secs()));
        println!(
            "{} criterion {name}: {} [{:.2}s, limit {limit}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
