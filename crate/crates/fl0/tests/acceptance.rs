//! End-to-end acceptance checks: pinned golden traces for every pipeline
//! stage, the two timed benchmark fixtures, randomized soundness and
//! completeness sweeps against the brute-force oracle, algebra laws, and
//! a byte-level determinism check.  Run with `--nocapture` to see the
//! per-criterion pass lines.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fl0::choice::{fix_choices, is_consistent, Choice};
use fl0::concept::concept_to_expr;
use fl0::flatten::{build_generic_goal, flatten_problem, FlatSubsumption, GenericGoal};
use fl0::implicit::{build_goal, run, Goal, Outcome};
use fl0::parser::{render_concept, render_substitution};
use fl0::shortcuts::{compute, extract_unifier, ComputeOutcome};
use fl0::subst::apply;
use fl0::symbol::{ConceptName, NameKind, RoleName, SymbolTable};
use fl0::testkit::{gen_problem, oracle_search, GeneratorParams, OracleVerdict};
use fl0::{
    solve, Axiom, Concept, InputFormat, Particle, ProblemSource, SolveOptions, Substitution,
    Verdict,
};

const NESTED: &str = "(sub (and (all r (and (all r (and A B)) C)) (all s (and A C)))
     (and A (all s (and (all r (and A C)) B))))";

const GOLDEN: &str = "(sub X_var (all r A))
(sub (and Y_var (all r X_var)) X_var)
(sub X_var (all r Y_var))";

fn parse(text: &str) -> ProblemSource {
    ProblemSource::parse(text, InputFormat::Flu).unwrap()
}

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Check a substitution against the original axioms, not any derived form.
fn unifies(src: &ProblemSource, sigma: &Substitution) -> bool {
    src.axioms.iter().all(|ax| {
        let (l, r) = ax.sides();
        let la = apply(sigma, &l.normalize(), &src.table);
        let ra = apply(sigma, &r.normalize(), &src.table);
        match ax {
            Axiom::Subsumption(..) => la.subsumes(&ra),
            Axiom::Equivalence(..) => la == ra,
        }
    })
}

fn role(table: &SymbolTable, text: &str) -> RoleName {
    table.roles().find(|&r| table.role_text(r) == text).unwrap()
}

fn concept(table: &SymbolTable, text: &str) -> ConceptName {
    table.lookup_concept(text).unwrap()
}

#[test]
fn criterion_01_golden_flattening() {
    let t0 = Instant::now();
    let mut src = parse(NESTED);
    let originals: Vec<(Concept, Concept)> = src
        .axioms
        .iter()
        .map(|ax| {
            let (l, r) = ax.sides();
            (l.normalize(), r.normalize())
        })
        .collect();
    let model = flatten_problem(&src.axioms, &mut src.table);
    let table = &src.table;
    assert_eq!(model.subsumptions.len(), 1);
    assert_eq!(model.equivalences.len(), 0);
    assert_eq!(model.definitions.len(), 6);

    // the six helper bodies, up to renaming of the helpers themselves
    let mut bodies: Vec<String> = model
        .definitions
        .iter()
        .map(|(_, body)| render_concept(body, table))
        .collect();
    bodies.sort();
    assert_eq!(
        bodies,
        ["(all r A)", "(all r A)", "(all r B)", "(all r C)", "(all s A)", "(all s C)"]
    );

    // the flat subsumption, rendered with each helper replaced by its body:
    // a renaming-independent exact description of both sides
    let defs: BTreeMap<ConceptName, &Concept> =
        model.definitions.iter().map(|(v, b)| (*v, b)).collect();
    let shape = |c: &Concept| -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = c
            .particles()
            .map(|p| {
                let word: Vec<&str> = p.word.iter().map(|&r| table.role_text(r)).collect();
                let head = match defs.get(&p.head) {
                    Some(body) => render_concept(body, table),
                    None => table.name_text(p.head).to_string(),
                };
                (word.join(" "), head)
            })
            .collect();
        v.sort();
        v
    };
    let (lhs, rhs) = &model.subsumptions[0];
    let pair = |w: &str, h: &str| (w.to_string(), h.to_string());
    assert_eq!(
        shape(lhs),
        [
            pair("", "(all s A)"),
            pair("", "(all s C)"),
            pair("r", "(all r A)"),
            pair("r", "(all r B)"),
            pair("r", "C"),
        ]
    );
    assert_eq!(
        shape(rhs),
        [
            pair("", "A"),
            pair("s", "(all r A)"),
            pair("s", "(all r C)"),
            pair("s", "B"),
        ]
    );

    // flatness: every definition body is one particle of depth exactly 1
    for (_, body) in &model.definitions {
        assert_eq!(body.len(), 1);
        assert!(body.particles().all(|p| p.depth() == 1));
    }

    // expanding the definitions recovers the input subsumption
    let mut expand = Substitution::new();
    for (var, body) in &model.definitions {
        let expanded = apply(&expand, body, table);
        expand.insert(*var, expanded);
    }
    assert_eq!(apply(&expand, lhs, table), originals[0].0);
    assert_eq!(apply(&expand, rhs, table), originals[0].1);

    let ms = t0.elapsed().as_millis();
    assert!(ms < 1000);
    println!("criterion 01 golden flattening: pass ({ms} ms)");
}

/// Parse the three-subsumption loop problem and build its goal for A.
fn golden_goal() -> (SymbolTable, GenericGoal) {
    let mut src = parse(GOLDEN);
    let model = flatten_problem(&src.axioms, &mut src.table);
    let a = concept(&src.table, "A");
    let goal = build_generic_goal(&model, a, &mut src.table);
    (src.table, goal)
}

struct GoldenNames {
    a: ConceptName,
    x: ConceptName,
    y: ConceptName,
    xr: ConceptName,
    yr: ConceptName,
    xa: ConceptName,
    r: RoleName,
}

fn golden_names(table: &SymbolTable, goal: &GenericGoal) -> GoldenNames {
    let x = concept(table, "X_var");
    let y = concept(table, "Y_var");
    let r = role(table, "r");
    GoldenNames {
        a: concept(table, "A"),
        x,
        y,
        xr: table.decomposition_of(x, r).unwrap(),
        yr: table.decomposition_of(y, r).unwrap(),
        xa: goal.const_decomp[0].1,
        r,
    }
}

#[test]
fn criterion_02_golden_generic_goal() {
    let t0 = Instant::now();
    let (table, goal) = golden_goal();
    let n = golden_names(&table, &goal);

    let flat = |lhs: &[ConceptName], rhs: ConceptName| FlatSubsumption {
        lhs: lhs.iter().copied().collect(),
        rhs,
    };
    assert_eq!(
        goal.flats,
        vec![
            flat(&[n.xr], n.a),
            flat(&[n.x, n.yr], n.xr),
            flat(&[n.y], n.xa),
            flat(&[n.xr], n.y),
        ]
    );
    assert_eq!(goal.increasing.len(), 2);
    assert!(goal
        .increasing
        .iter()
        .any(|inc| (inc.parent, inc.role, inc.child) == (n.x, n.r, n.xr)));
    assert!(goal
        .increasing
        .iter()
        .any(|inc| (inc.parent, inc.role, inc.child) == (n.y, n.r, n.yr)));
    assert_eq!(goal.const_decomp, vec![(n.x, n.xa)]);

    let ms = t0.elapsed().as_millis();
    assert!(ms < 1000);
    println!("criterion 02 golden generic goal: pass ({ms} ms)");
}

/// All choices of the golden goal, in enumeration order.
fn golden_choices(table: &SymbolTable, goal: &GenericGoal) -> Vec<Choice> {
    fix_choices(goal, table).unwrap().choices().collect()
}

#[test]
fn criterion_03_golden_choice_behavior() {
    let t0 = Instant::now();
    let (table, goal) = golden_goal();
    let all = golden_choices(&table, &goal);

    assert_eq!(all[0].digits(), "(0,1,0,0,0)");
    assert!(!is_consistent(&goal, &all[0]));

    let consistent: Vec<&Choice> =
        all.iter().filter(|c| is_consistent(&goal, c)).collect();
    assert_eq!(consistent[0].digits(), "(1,1,1,0,0)");
    assert_eq!(consistent[1].digits(), "(1,1,1,1,0)");

    // first consistent choice: refuted outright
    assert!(matches!(
        run(build_goal(&goal, consistent[0].clone()), &table),
        Outcome::Failed
    ));

    // second: survives as a residual goal with pinned flats and starts
    let n = golden_names(&table, &goal);
    let Outcome::Residual(res) = run(build_goal(&goal, consistent[1].clone()), &table) else {
        panic!("expected a residual goal");
    };
    let flat = |lhs: &[ConceptName], rhs: ConceptName| FlatSubsumption {
        lhs: lhs.iter().copied().collect(),
        rhs,
    };
    assert_eq!(
        res.unsolved,
        vec![flat(&[n.x], n.xr), flat(&[n.y], n.xa), flat(&[n.xr], n.y)]
    );
    assert_eq!(res.starts, vec![n.x, n.xr, n.xa, n.y]);

    let ms = t0.elapsed().as_millis();
    assert!(ms < 1000);
    println!("criterion 03 golden choice behavior: pass ({ms} ms)");
}

/// The residual goal of the golden problem's second consistent choice.
fn golden_residual<'g>(table: &SymbolTable, goal: &'g GenericGoal) -> Goal<'g> {
    let choice = golden_choices(table, goal)
        .into_iter()
        .filter(|c| is_consistent(goal, c))
        .nth(1)
        .unwrap();
    match run(build_goal(goal, choice), table) {
        Outcome::Residual(res) => res,
        other => panic!("expected a residual goal, got {other:?}"),
    }
}

#[test]
fn criterion_04_golden_shortcut_run() {
    let t0 = Instant::now();
    let (table, goal) = golden_goal();
    let n = golden_names(&table, &goal);
    let res = golden_residual(&table, &goal);

    let ComputeOutcome::Success(store) = compute(&res, &table).unwrap() else {
        panic!("the residual goal is solvable");
    };
    let admitted = store.admitted();
    let set = |names: &[ConceptName]| names.iter().copied().collect::<BTreeSet<_>>();
    assert_eq!(
        admitted,
        vec![
            set(&[n.x]),
            set(&[n.x, n.xr]),
            set(&[n.x, n.xr, n.y]),
            set(&[n.x, n.xr, n.xa, n.y]),
            set(&[n.x, n.xr, n.xa, n.y, n.a]),
        ]
    );

    let sigma = extract_unifier(&store);
    assert_eq!(
        sigma.value(n.x),
        Concept::from_particles([Particle::name(n.a), Particle::new(vec![n.r], n.a)])
    );
    assert_eq!(sigma.value(n.y), Concept::from_particle(Particle::name(n.a)));

    // and the user projection unifies the original problem
    let mut user = sigma.clone();
    user.retain(|v| table.kind(v) == NameKind::UserVariable);
    // same text, same interning: user-variable names align across parses
    let src = parse(GOLDEN);
    assert!(unifies(&src, &user));

    let ms = t0.elapsed().as_millis();
    assert!(ms < 1000);
    println!("criterion 04 golden shortcut run: pass ({ms} ms)");
}

#[test]
fn criterion_05_deep_equivalence_benchmark() {
    let t0 = Instant::now();
    let src = parse(&fixture("deep_equiv.flu"));
    let result = solve(&src, &SolveOptions::default()).unwrap();
    let Verdict::Unifiable(sigma) = &result.verdict else {
        panic!("the benchmark problem is unifiable");
    };
    assert!(unifies(&src, sigma));
    let ms = t0.elapsed().as_millis();
    assert!(ms < 60_000);
    println!(
        "criterion 05 deep equivalence benchmark: pass ({ms} ms; {} variables, {} decided, {} phases)",
        result.stats.max_variables,
        result.stats.preprocessing_decided,
        result.stats.shortcut_phases
    );
}

#[test]
fn criterion_06_early_exit_on_failure() {
    let t0 = Instant::now();
    let src = parse(&fixture("nonunif.flu"));
    assert_eq!(src.constants().len(), 2);
    let result = solve(&src, &SolveOptions::default()).unwrap();
    assert_eq!(result.verdict, Verdict::NotUnifiable);
    // the second constant is never attempted
    assert_eq!(result.stats.constants_processed, 1);
    let ms = t0.elapsed().as_millis();
    assert!(ms < 120_000);
    println!("criterion 06 early exit on failure: pass ({ms} ms)");
}

#[test]
fn criterion_07_constant_free_problems() {
    let t0 = Instant::now();
    let src = parse(&fixture("constant_free.flu"));
    let result = solve(&src, &SolveOptions::default()).unwrap();
    let Verdict::Unifiable(sigma) = &result.verdict else {
        panic!("constant-free problems are always unifiable");
    };
    for v in src.user_variables() {
        assert!(sigma.value(v).is_top());
    }
    assert!(unifies(&src, sigma));
    let ms = t0.elapsed().as_millis();
    assert!(ms < 1000);
    println!("criterion 07 constant-free problems: pass ({ms} ms)");
}

fn sweep_families() -> Vec<GeneratorParams> {
    let combos: [(usize, usize, usize, usize, usize); 7] = [
        (1, 2, 1, 1, 2),
        (1, 2, 2, 2, 2),
        (2, 2, 1, 1, 2),
        (2, 3, 1, 1, 3),
        (1, 1, 1, 2, 1),
        (2, 2, 2, 1, 4),
        (1, 3, 2, 1, 2),
    ];
    combos
        .into_iter()
        .map(|(c, v, r, d, s)| GeneratorParams {
            n_constants: c,
            n_variables: v,
            n_roles: r,
            max_depth: d,
            n_subsumptions: s,
            seed: 0,
        })
        .collect()
}

#[test]
fn criterion_08_soundness_sweep() {
    let t0 = Instant::now();
    let mut total = 0usize;
    let mut unifiable = 0usize;
    for family in sweep_families() {
        for seed in 0..75 {
            let src = gen_problem(&GeneratorParams { seed, ..family }).unwrap();
            let result = solve(&src, &SolveOptions::default()).unwrap();
            total += 1;
            if let Verdict::Unifiable(sigma) = &result.verdict {
                unifiable += 1;
                assert!(
                    unifies(&src, sigma),
                    "unsound witness on seed {seed} of {family:?}"
                );
            }
        }
    }
    assert!(total >= 500);
    println!(
        "criterion 08 soundness sweep: pass ({total} instances, {unifiable} unifiable, {} ms)",
        t0.elapsed().as_millis()
    );
}

#[test]
fn criterion_09_completeness_sweep() {
    let t0 = Instant::now();
    // parameter families kept inside the oracle's enumeration budget
    let combos: [(usize, usize, usize, usize, usize); 6] = [
        (1, 2, 1, 2, 1),
        (1, 2, 2, 1, 2),
        (2, 2, 1, 1, 2),
        (1, 2, 2, 2, 2),
        (2, 1, 2, 1, 2),
        (2, 2, 1, 2, 1),
    ];
    let mut found = 0usize;
    let mut total = 0usize;
    'outer: for (c, v, r, d, s) in combos {
        for seed in 0..120 {
            let params = GeneratorParams {
                n_constants: c,
                n_variables: v,
                n_roles: r,
                max_depth: d,
                n_subsumptions: s,
                seed,
            };
            let src = gen_problem(&params).unwrap();
            let oracle = match oracle_search(&src, 2) {
                Ok(verdict) => verdict,
                Err(_) => continue, // over budget: no evidence either way
            };
            total += 1;
            if let OracleVerdict::Found(witness) = oracle {
                found += 1;
                assert!(unifies(&src, &witness), "oracle self-check on {params:?}");
                let result = solve(&src, &SolveOptions::default()).unwrap();
                assert!(
                    matches!(result.verdict, Verdict::Unifiable(_)),
                    "missed unifiable instance {params:?}"
                );
                if found >= 200 {
                    break 'outer;
                }
            }
        }
    }
    assert!(found >= 200, "only {found} oracle hits across {total} instances");
    println!(
        "criterion 09 completeness sweep: pass ({found} oracle hits, {} ms)",
        t0.elapsed().as_millis()
    );
}

#[test]
fn criterion_10_algebra_laws() {
    let t0 = Instant::now();
    let mut table = SymbolTable::new();
    let a = table.intern_concept("A");
    let b = table.intern_concept("B");
    let r = table.intern_role("r");
    let s = table.intern_role("s");
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let random_ground = |rng: &mut ChaCha8Rng| -> Concept {
        let n = rng.gen_range(0..=4);
        Concept::from_particles((0..n).map(|_| {
            let len = rng.gen_range(0..=3);
            let word = (0..len)
                .map(|_| if rng.gen_bool(0.5) { r } else { s })
                .collect();
            Particle::new(word, if rng.gen_bool(0.5) { a } else { b })
        }))
    };
    for i in 0..1000 {
        let c = random_ground(&mut rng);
        let d = random_ground(&mut rng);

        // normal form is a fixpoint of its own syntax
        assert_eq!(concept_to_expr(&c).normalize(), c, "iteration {i}");

        // partial order: reflexive, ⊤ greatest, antisymmetric, transitive
        assert!(c.subsumes(&c));
        assert!(c.subsumes(&Concept::top()));
        if c.subsumes(&d) && d.subsumes(&c) {
            assert_eq!(c, d, "iteration {i}");
        }
        let mut cd = c.clone();
        cd.extend(&d);
        assert!(cd.subsumes(&c), "iteration {i}");
        let mut cde = cd.clone();
        cde.extend(&random_ground(&mut rng));
        assert!(cde.subsumes(&cd) && cd.subsumes(&c) && cde.subsumes(&c));

        // subsumption holds exactly when it holds for every constant alone
        let per_constant = [a, b].iter().all(|&k| {
            c.restrict_to_constant(k, false, &table)
                .subsumes(&d.restrict_to_constant(k, false, &table))
        });
        assert_eq!(c.subsumes(&d), per_constant, "iteration {i}");
    }
    let ms = t0.elapsed().as_millis();
    assert!(ms < 10_000);
    println!("criterion 10 algebra laws: pass ({ms} ms)");
}

/// Everything criteria 1–7 observe, rendered to one string with timings
/// excluded.  Each call re-parses from scratch.
fn transcript() -> String {
    let mut out = String::new();

    // flattening of the nested fixture
    let mut src = parse(NESTED);
    let model = flatten_problem(&src.axioms, &mut src.table);
    for (l, r) in &model.subsumptions {
        out.push_str(&format!(
            "(sub {} {})\n",
            render_concept(l, &src.table),
            render_concept(r, &src.table)
        ));
    }
    for (v, body) in &model.definitions {
        out.push_str(&format!(
            "(equiv {} {})\n",
            src.table.name_text(*v),
            render_concept(body, &src.table)
        ));
    }

    // choices and residual of the golden goal
    let (table, goal) = golden_goal();
    for choice in golden_choices(&table, &goal) {
        out.push_str(&choice.digits());
        out.push(if is_consistent(&goal, &choice) { '+' } else { '-' });
        out.push('\n');
    }
    let res = golden_residual(&table, &goal);
    for f in &res.unsolved {
        let lhs: Vec<&str> = f.lhs.iter().map(|&v| table.name_text(v)).collect();
        out.push_str(&format!("{} <= {}\n", lhs.join(" "), table.name_text(f.rhs)));
    }
    for v in &res.starts {
        out.push_str(table.name_text(*v));
        out.push('\n');
    }

    // solver runs over the fixture problems, counters included
    for name in ["deep_equiv.flu", "nonunif.flu", "constant_free.flu"] {
        let text = fixture(name);
        for parallel in [false, true] {
            let src = parse(&text);
            let result = solve(&src, &SolveOptions { parallel }).unwrap();
            out.push_str(&format!("{name} parallel={parallel} "));
            match &result.verdict {
                Verdict::Unifiable(sigma) => {
                    out.push_str("unifiable\n");
                    out.push_str(&render_substitution(sigma, &result.table));
                }
                Verdict::NotUnifiable => out.push_str("not unifiable\n"),
            }
            out.push_str(&format!(
                "stats {} {} {} {}\n",
                result.stats.max_variables,
                result.stats.preprocessing_decided,
                result.stats.shortcut_phases,
                result.stats.constants_processed
            ));
        }
    }
    out
}

#[test]
fn criterion_11_determinism() {
    let t0 = Instant::now();
    let first = transcript();
    let second = transcript();
    assert_eq!(first, second);
    println!(
        "criterion 11 determinism: pass ({} bytes × 2, {} ms)",
        first.len(),
        t0.elapsed().as_millis()
    );
}
