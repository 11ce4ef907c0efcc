//! Acceptance checks. Runs every criterion, prints one PASS/FAIL line for
//! each and exits non-zero if any failed.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use meshtopo::cutgraph::{build_cut_graph, cut_all_but_cotree, cut_mesh};
use meshtopo::generators::{generate, GeneratorSpec};
use meshtopo::io::write_obj;
use meshtopo::mesh::{ElementSet, Mesh};
use meshtopo::topology::{
    betti_closed_form, betti_incremental, boundary_cycles, components, genus, instigator_partition,
    make_filtration, TopologyError,
};
use meshtopo::validation::{check_edge_manifold, check_orientable, check_vertex_links, validate};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PLATONIC_BUDGET: Duration = Duration::from_secs(1);
const FILTRATION_BUDGET: Duration = Duration::from_secs(30);
const FILTRATIONS_PER_MESH: u64 = 100;
const MIN_IDENTITY_MESHES: usize = 200;
const MIN_ROOTS: usize = 5;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn gen(spec: GeneratorSpec) -> Mesh {
    generate(&spec).unwrap_or_else(|e| panic!("{spec}: {e}"))
}

/// (s, g, b) with `None` where undefined.
fn sgb(m: &Mesh) -> (usize, Option<u64>, Option<usize>) {
    (
        components(m).count,
        genus(m).ok(),
        boundary_cycles(m).ok().map(|c| c.len()),
    )
}

fn platonic() -> [(GeneratorSpec, [usize; 3]); 5] {
    [
        (GeneratorSpec::Tetrahedron, [4, 6, 4]),
        (GeneratorSpec::Cube, [8, 12, 6]),
        (GeneratorSpec::Octahedron, [6, 12, 8]),
        (GeneratorSpec::Dodecahedron, [20, 30, 12]),
        (GeneratorSpec::Icosahedron, [12, 30, 20]),
    ]
}

fn tori() -> Vec<GeneratorSpec> {
    (3..=8)
        .flat_map(|m| (3..=8).map(move |n| GeneratorSpec::TorusGrid { m, n }))
        .collect()
}

fn chains() -> Vec<GeneratorSpec> {
    (0..=4).map(|g| GeneratorSpec::GenusG { g }).collect()
}

/// Every generator kind with parameter sweeps.
fn sweep() -> Vec<GeneratorSpec> {
    use GeneratorSpec::*;
    let mut specs: Vec<GeneratorSpec> = platonic().iter().map(|(s, _)| *s).collect();
    specs.extend([
        Hexagon,
        Fig2,
        TriFanSharedEdge,
        TwoTetsSharedVertex,
        CubeOpen,
    ]);
    specs.extend(tori());
    specs.extend(chains());
    for k in 3..=30 {
        specs.push(Annulus { segments: k });
        specs.push(Moebius { segments: k });
    }
    specs
}

fn relabelled(m: &Mesh, seed: u64) -> Mesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..m.vertex_count()).collect();
    perm.shuffle(&mut rng);
    let mut faces: Vec<Vec<usize>> = m
        .faces()
        .iter()
        .map(|f| f.iter().map(|&v| perm[v]).collect())
        .collect();
    faces.shuffle(&mut rng);
    Mesh::new(m.vertex_count(), faces, None).unwrap()
}

/// Sweep meshes plus a relabelled copy of each.
fn identity_corpus() -> Vec<(String, Mesh)> {
    let mut out = Vec::new();
    for (i, spec) in sweep().into_iter().enumerate() {
        let m = gen(spec);
        out.push((format!("{spec} relabelled"), relabelled(&m, i as u64)));
        out.push((spec.to_string(), m));
    }
    out
}

fn platonic_counts() -> Outcome {
    let start = Instant::now();
    for (spec, [v, e, f]) in platonic() {
        let m = gen(spec);
        let got = [m.vertex_count(), m.edge_count(), m.face_count()];
        ensure(got == [v, e, f], || {
            format!("{spec}: counts {got:?}, expected {:?}", [v, e, f])
        })?;
        ensure(m.euler_characteristic() == 2, || {
            format!("{spec}: χ = {}", m.euler_characteristic())
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < PLATONIC_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("5 solids, χ = 2, E = 6/12/12/30/30, {elapsed:?}"))
}

fn quantitative_table() -> Outcome {
    // VN VC EN EC FN FC s g b β0 β1 β2
    let rows: [(GeneratorSpec, [i64; 12]); 4] = [
        (GeneratorSpec::Hexagon, [0, 6, 5, 1, 1, 0, 1, 0, 1, 1, 0, 0]),
        (
            GeneratorSpec::Annulus { segments: 6 },
            [0, 12, 11, 7, 6, 0, 1, 0, 2, 1, 1, 0],
        ),
        (
            GeneratorSpec::Tetrahedron,
            [0, 4, 3, 3, 3, 1, 1, 0, 0, 1, 0, 1],
        ),
        (
            GeneratorSpec::TorusGrid { m: 3, n: 3 },
            [0, 9, 8, 10, 8, 1, 1, 1, 0, 1, 2, 1],
        ),
    ];
    for (spec, expected) in rows {
        let m = gen(spec);
        let p = instigator_partition(&m);
        let (s, g, b) = sgb(&m);
        let betti = betti_closed_form(&m).0;
        let g = g.ok_or_else(|| format!("{spec}: genus undefined"))? as i64;
        let b = b.ok_or_else(|| format!("{spec}: boundary undefined"))? as i64;
        let got = [
            p.v_n as i64,
            p.v_c as i64,
            p.e_n as i64,
            p.e_c as i64,
            p.f_n as i64,
            p.f_c as i64,
            s as i64,
            g,
            b,
            betti[0],
            betti[1],
            betti[2],
        ];
        ensure(got == expected, || {
            format!("{spec}: got {got:?}, expected {expected:?}")
        })?;
    }
    Ok("hexagon, annulus, tetrahedron, torus rows exact".into())
}

fn euler_poincare_identity() -> Outcome {
    let corpus = identity_corpus();
    ensure(corpus.len() >= MIN_IDENTITY_MESHES, || {
        format!("only {} meshes", corpus.len())
    })?;
    let mut with_genus = 0;
    for (name, m) in &corpus {
        let chi = m.euler_characteristic();
        let betti = betti_closed_form(m).0;
        let (s, g, b) = sgb(m);
        ensure(betti[0] == s as i64, || {
            format!("{name}: β0 = {} but s = {s}", betti[0])
        })?;
        ensure(betti[0] - betti[1] + betti[2] == chi, || {
            format!("{name}: β {betti:?} vs χ = {chi}")
        })?;
        if let Some(g) = g {
            let b = b.ok_or_else(|| format!("{name}: genus defined but boundary is not"))?;
            let rhs = 2 * (s as i64 - g as i64) - b as i64;
            ensure(rhs == chi, || {
                format!("{name}: 2(s−g)−b = {rhs}, χ = {chi}")
            })?;
            with_genus += 1;
        }
    }
    Ok(format!(
        "{} meshes, {with_genus} with defined genus",
        corpus.len()
    ))
}

fn filtration_equivalence() -> Outcome {
    let start = Instant::now();
    let mut meshes = 0;
    for (name, m) in identity_corpus() {
        if !check_edge_manifold(&m).passed {
            continue;
        }
        let expected = betti_closed_form(&m);
        for seed in 0..FILTRATIONS_PER_MESH {
            let f = make_filtration(&m, seed);
            let got = betti_incremental(&m, &f).map_err(|e| format!("{name}: {e}"))?;
            ensure(got == expected, || {
                format!("{name} seed {seed}: {got} vs {expected}")
            })?;
        }
        meshes += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < FILTRATION_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{meshes} meshes × {FILTRATIONS_PER_MESH} filtrations, {elapsed:?}"
    ))
}

fn loop_counts() -> Outcome {
    let mut cases: Vec<(GeneratorSpec, usize)> = [(3, 3), (4, 5), (6, 6), (8, 7)]
        .into_iter()
        .map(|(m, n)| (GeneratorSpec::TorusGrid { m, n }, 2))
        .collect();
    cases.extend((0..=4).map(|g| (GeneratorSpec::GenusG { g }, 2 * g)));
    for (spec, expected) in &cases {
        let m = gen(*spec);
        let roots: BTreeSet<usize> = (0..MIN_ROOTS)
            .map(|k| k * m.vertex_count() / MIN_ROOTS)
            .collect();
        ensure(roots.len() == MIN_ROOTS, || {
            format!("{spec}: roots {roots:?}")
        })?;
        for &root in &roots {
            let cg = build_cut_graph(&m, root).map_err(|e| format!("{spec} root {root}: {e}"))?;
            ensure(cg.loops.len() == *expected, || {
                format!(
                    "{spec} root {root}: {} loops, expected {expected}",
                    cg.loops.len()
                )
            })?;
        }
    }
    Ok(format!("{} meshes × {MIN_ROOTS} roots", cases.len()))
}

fn cut_to_disc() -> Outcome {
    let mut specs: Vec<GeneratorSpec> = platonic().iter().map(|(s, _)| *s).collect();
    specs.extend(tori());
    specs.extend(chains());
    let disc = (1, Some(0), Some(1));
    for spec in &specs {
        let m = gen(*spec);
        let cg = build_cut_graph(&m, 0).map_err(|e| format!("{spec}: {e}"))?;
        let opened = cut_mesh(&m, &cg.cut_edges()).map_err(|e| format!("{spec}: {e}"))?;
        ensure(sgb(&opened) == disc, || {
            format!("{spec}: (s, g, b) = {:?}", sgb(&opened))
        })?;
        ensure(validate(&opened).is_manifold(), || {
            format!("{spec}: cut mesh is not manifold")
        })?;
        let oracle = cut_all_but_cotree(&m, &cg.cotree).map_err(|e| format!("{spec}: {e}"))?;
        ensure(sgb(&oracle) == disc, || {
            format!("{spec}: co-tree cut gives {:?}", sgb(&oracle))
        })?;
    }
    Ok(format!("{} closed meshes, co-tree cut agrees", specs.len()))
}

/// Edges of grid row `i` of a torus_grid(m, n): the loop through (i, 0..n).
fn grid_row(mesh: &Mesh, n: usize, i: usize) -> Vec<usize> {
    (0..n)
        .map(|j| {
            mesh.edge_between(i * n + j, i * n + (j + 1) % n)
                .expect("grid edge")
        })
        .collect()
}

fn disjoint_loops() -> Outcome {
    let (rows, cols) = (6, 6);
    let m = gen(GeneratorSpec::TorusGrid { m: rows, n: cols });
    let mut measured = Vec::new();
    let mut failures = Vec::new();
    for n in [2usize, 3] {
        let loops: Vec<Vec<usize>> = (0..n).map(|k| grid_row(&m, cols, 2 * k)).collect();
        for l in &loops {
            let set = ElementSet::edges(l.iter().copied());
            ensure(m.is_simple_cycle(&set).unwrap(), || {
                "grid row is not a simple cycle".into()
            })?;
        }
        let touched: Vec<BTreeSet<usize>> = loops
            .iter()
            .map(|l| l.iter().flat_map(|&e| m.edge(e).vertices()).collect())
            .collect();
        for a in 0..n {
            for b in a + 1..n {
                ensure(touched[a].is_disjoint(&touched[b]), || {
                    "loops share a vertex".into()
                })?;
            }
        }
        let cut = ElementSet::edges(loops.into_iter().flatten());
        let opened = cut_mesh(&m, &cut).map_err(|e| e.to_string())?;
        let (s, g, b) = sgb(&opened);
        let b = b.ok_or("boundary undefined")?;
        measured.push(format!(
            "n={n}: s={s} g={} b={b}",
            g.map_or("-".into(), |g| g.to_string())
        ));
        if b != n {
            failures.push(format!("n={n}: b={b}, expected {n}"));
        }
    }
    if failures.is_empty() {
        Ok(measured.join("; "))
    } else {
        Err(format!("{} ({})", failures.join("; "), measured.join("; ")))
    }
}

fn pathologies() -> Outcome {
    let pinched = gen(GeneratorSpec::TwoTetsSharedVertex);
    let links = check_vertex_links(&pinched);
    ensure(!links.passed && links.offenders == [0], || {
        format!("two tets: links {links:?}")
    })?;

    let fan = gen(GeneratorSpec::TriFanSharedEdge);
    ensure(!check_edge_manifold(&fan).passed, || {
        "fan passed the edge check".into()
    })?;
    let b = betti_closed_form(&fan).0;
    ensure(b == [1, 0, 0], || format!("fan betti {b:?}"))?;

    let band = gen(GeneratorSpec::Moebius { segments: 6 });
    let o = check_orientable(&band).map_err(|e| e.to_string())?;
    ensure(!o.orientable, || "moebius reported orientable".into())?;
    ensure(!validate(&band).orientable, || {
        "moebius report says orientable".into()
    })?;
    ensure(
        matches!(genus(&band), Err(TopologyError::GenusUndefined { .. })),
        || format!("moebius genus {:?}", genus(&band)),
    )?;
    Ok("pinched links, fan β = (1,0,0), moebius non-orientable".into())
}

fn info_json(arg: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_meshtopo"))
        .arg("info")
        .args(arg)
        .arg("--json")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{arg:?}: exit {:?}", out.status.code())
    })?;
    Ok(out.stdout)
}

fn deterministic_reports() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for spec in GeneratorSpec::catalogue() {
        let name = spec.to_string();
        let path = dir
            .path()
            .join(format!("{}.obj", name.replace([':', ','], "_")));
        std::fs::write(&path, write_obj(&gen(spec), None).unwrap()).map_err(|e| e.to_string())?;
        let path = path.to_str().unwrap().to_string();
        for input in [vec!["--gen", name.as_str()], vec![path.as_str()]] {
            let first = info_json(&input)?;
            let second = info_json(&input)?;
            ensure(!first.is_empty() && first == second, || {
                format!("{input:?}: outputs differ")
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} inputs, byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "platonic solid counts and Euler characteristic",
            platonic_counts,
        ),
        (
            "instigator partition and Betti table rows",
            quantitative_table,
        ),
        (
            "Euler characteristic equals genus form and Betti sum",
            euler_poincare_identity,
        ),
        (
            "incremental Betti equals closed form over random filtrations",
            filtration_equivalence,
        ),
        ("cut graph has 2g loops from every root", loop_counts),
        ("cut graph opens closed meshes to a disc", cut_to_disc),
        ("n disjoint loops leave n boundary curves", disjoint_loops),
        ("pathological meshes are diagnosed", pathologies),
        (
            "info --json is byte-identical across runs",
            deterministic_reports,
        ),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} [{detail}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{why}]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
