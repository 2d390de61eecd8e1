//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stabdistill::densesim::{lemma1_residuals, lemma2_check, run_protocol_dense, table1_overlaps, Encoder, Ensemble};
use stabdistill::protocol::{analyze, general_fidelity_bound, good_set, AcceptPolicy, ConvertedProtocol, Decoder};
use stabdistill::rates::{combined_yield, comparison_sweep, fidelity_grid, hashing_yield, werner_hashing_threshold};
use stabdistill::symplectic::{is_isotropic, row_reduce_in, symplectic_dual, witt_extend, SympSubspace};
use stabdistill::{io, presets, BellDiagState, DecodeTable, StabilizerCode, SympVector};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn all_presets() -> Vec<(&'static str, StabilizerCode)> {
    presets::PRESET_NAMES.iter().map(|&n| (n, presets::preset(n).unwrap())).collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut runs = 0;
    for name in ["recurrence", "qpa"] {
        let code = presets::preset(name).unwrap();
        let enc = Encoder::canonical(&code).map_err(|e| e.to_string())?;
        let proto = ConvertedProtocol::one_way(code);
        for _ in 0..20 {
            let alpha = BellDiagState::<f64>::random(2, 2, &mut rng).unwrap();
            let report = analyze(&proto, &alpha).map_err(|e| e.to_string())?;
            let rho = Ensemble::from_bell_diag(&alpha).map_err(|e| e.to_string())?;
            let run = run_protocol_dense(&proto, &rho, &enc).map_err(|e| e.to_string())?;
            for (a, b) in report.records.iter().zip(&run.records) {
                worst = worst.max((a.probability - b.probability).abs());
                worst = worst.max((a.fidelity - b.fidelity).abs());
            }
            runs += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst < 1e-9, format!("max deviation {worst:e}"))?;
    ensure(secs < 60.0, format!("took {secs:.1}s"))?;
    Ok(format!("{runs} inputs, max deviation {worst:.2e}, {secs:.2}s"))
}

fn lemma1() -> Outcome {
    let mut worst = 0.0f64;
    for (_, code) in all_presets() {
        for r in lemma1_residuals::<f64>(&code).map_err(|e| e.to_string())? {
            worst = worst.max(r);
        }
    }
    ensure(worst < 1e-12, format!("residual {worst:e}"))?;
    Ok(format!("max residual {worst:.2e}"))
}

fn lemma2() -> Outcome {
    let mut parts = Vec::new();
    for (name, code) in all_presets() {
        let chk = lemma2_check::<f64>(&code, &DecodeTable::minimal(&code)).map_err(|e| e.to_string())?;
        ensure(chk.max_overlap <= 0.75 + 1e-12, format!("{name}: max overlap {}", chk.max_overlap))?;
        parts.push(format!("{name} {:.6}", chk.max_overlap));
    }
    let code = presets::recurrence();
    let v = |c: &[u32]| SympVector::new(2, c.to_vec()).unwrap();
    let rule = DecodeTable::new(&code, vec![v(&[0, 0, 0, 0]), v(&[0, 0, 1, 0])]).unwrap();
    let chk = lemma2_check::<f64>(&code, &rule).map_err(|e| e.to_string())?;
    let expect = (2f64.sqrt() + 1.0) / (2.0 + 2f64.sqrt());
    ensure((chk.max_overlap - expect).abs() < 1e-9, format!("Z⊗Z witness {}", chk.max_overlap))?;
    parts.push(format!("Z⊗Z witness {:.6}", chk.max_overlap));
    Ok(parts.join(", "))
}

fn recurrence_numbers() -> Outcome {
    let f = 0.75;
    let w = BellDiagState::<f64>::werner_converted(f).unwrap();
    let table = w.densify().unwrap();
    // direct enumeration over (a1, b1, a2, b2): accept iff a1 = a2, success iff u ∈ {0, ZZ}
    let (mut accept, mut good) = (0.0, 0.0);
    for a1 in 0..2 {
        for b1 in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    let weight = table[a1 * 2 + b1] * table[a2 * 2 + b2];
                    if a1 == a2 {
                        accept += weight;
                        if a1 == 0 && b1 == b2 {
                            good += weight;
                        }
                    }
                }
            }
        }
    }
    let enum_fid = good / accept;
    let proto = ConvertedProtocol::two_way(presets::recurrence());
    let pair = BellDiagState::tensor(&[w.clone(), w]).unwrap();
    let report = analyze(&proto, &pair).map_err(|e| e.to_string())?;
    let enc = Encoder::canonical(proto.code()).map_err(|e| e.to_string())?;
    let run = run_protocol_dense(&proto, &Ensemble::from_bell_diag(&pair).unwrap(), &enc).map_err(|e| e.to_string())?;
    for (label, acc, fid) in [
        ("enumeration", accept, enum_fid),
        ("coset analysis", report.accept_prob, report.records[0].fidelity),
        ("dense simulation", run.accept_prob, run.records[0].fidelity),
    ] {
        ensure((acc - 0.722_222_222_222).abs() < 1e-9, format!("{label}: accept_prob {acc}"))?;
        ensure((fid - 0.788_462).abs() < 1e-6, format!("{label}: fidelity {fid}"))?;
    }
    Ok(format!("accept_prob {:.9}, fidelity(0) {:.6}", report.accept_prob, report.records[0].fidelity))
}

fn hashing() -> Outcome {
    let one = hashing_yield(&BellDiagState::<f64>::werner_converted(1.0).unwrap());
    ensure(one == 1.0, format!("yield at F = 1 is {one}"))?;
    let root: f64 = werner_hashing_threshold();
    ensure((root - 0.8107).abs() < 1e-3, format!("zero crossing at {root}"))?;
    let uniform = BellDiagState::<f64>::uniform(3, 1).unwrap();
    let y = hashing_yield(&uniform);
    ensure(y == 0.0, format!("uniform ternary yield {y}"))?;
    Ok(format!("yield(1) = {one}, crossing {root:.6}, uniform ternary {y}"))
}

fn yield_ordering() -> Outcome {
    let protos: Vec<(String, ConvertedProtocol)> = presets::PRESET_NAMES
        .iter()
        .map(|&n| (n.to_string(), ConvertedProtocol::two_way(presets::preset(n).unwrap())))
        .collect();
    let mut parts = Vec::new();
    for f in [0.78, 0.80, 0.82] {
        let y: Vec<f64> = protos
            .iter()
            .map(|(_, p)| combined_yield(p, f, 6).map(|c| c.net_yield))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure(y[2] > y[0] && y[2] > y[1], format!("F = {f}: yields {y:?}"))?;
        parts.push(format!("F={f}: {:.4} > {:.4}, {:.4}", y[2], y[0], y[1]));
    }
    let grid = fidelity_grid(0.70, 0.90, 0.01).unwrap();
    let curves = comparison_sweep(&protos, &grid, 6).map_err(|e| e.to_string())?;
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("yield_sweep.csv");
    let mut file = std::fs::File::create(&path).map_err(|e| e.to_string())?;
    io::write_sweep_csv(&curves, &mut file).map_err(|e| e.to_string())?;
    parts.push(format!("sweep archived at {}", path.display()));
    Ok(parts.join("; "))
}

fn good_set_property() -> Outcome {
    let mut checked = 0;
    for (name, code) in all_presets() {
        for policy in [AcceptPolicy::OneWay, AcceptPolicy::ZeroSyndrome] {
            let table = DecodeTable::minimal(&code);
            let proto = ConvertedProtocol::new(code.clone(), Decoder::Table(table), policy).unwrap();
            let reference = BellDiagState::<f64>::uniform(2, code.n()).unwrap();
            let good = good_set(&proto, &reference).map_err(|e| e.to_string())?;
            let members = good.members().map_err(|e| e.to_string())?;
            ensure(members.len() as u128 == good.size(), format!("{name}: member count"))?;
            for u in &members {
                let r = analyze(&proto, &BellDiagState::<f64>::point_mass(u).unwrap()).map_err(|e| e.to_string())?;
                let s = code.syndrome_of(u).unwrap().index();
                let rec = &r.records[s];
                ensure(
                    rec.accepted && (rec.probability - 1.0).abs() < 1e-12 && (rec.fidelity - 1.0).abs() < 1e-12,
                    format!("{name}: good error {u} gives fidelity {}", rec.fidelity),
                )?;
                checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut gap = f64::INFINITY;
    for name in ["recurrence", "qpa"] {
        let code = presets::preset(name).unwrap();
        let enc = Encoder::canonical(&code).unwrap();
        for proto in [ConvertedProtocol::one_way(code.clone()), ConvertedProtocol::two_way(code.clone())] {
            for _ in 0..10 {
                let rho = Ensemble::<f64>::random(2, 2, 16, &mut rng).unwrap();
                let coeffs = rho.bell_coefficients().unwrap();
                let bound = general_fidelity_bound(&proto, &coeffs).map_err(|e| e.to_string())?;
                let run = run_protocol_dense(&proto, &rho, &enc).map_err(|e| e.to_string())?;
                ensure(
                    bound <= run.fidelity_mass + 1e-12,
                    format!("{name}: bound {bound} exceeds exact {}", run.fidelity_mass),
                )?;
                gap = gap.min(run.fidelity_mass - bound);
            }
        }
    }
    Ok(format!("{checked} good errors reach fidelity 1; 40 random states, min(exact - bound) = {gap:.2e}"))
}

fn table1() -> Outcome {
    let enc = Encoder::<f64>::canonical(&presets::xxxx_zzzz()).unwrap();
    let overlaps = table1_overlaps(&enc).map_err(|e| e.to_string())?;
    let worst = overlaps.iter().map(|o| (o - 1.0).abs()).fold(0.0, f64::max);
    ensure(overlaps.len() == 16 && worst < 1e-12, format!("worst |overlap - 1| = {worst:e}"))?;
    Ok(format!("16 rows, worst |overlap - 1| = {worst:.2e}"))
}

/// All subspaces spanned by at most two vectors of Z_p^{2n}.
fn small_subspaces(p: u32, n: usize) -> Vec<SympSubspace> {
    let size = (p as usize).pow(2 * n as u32);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for i in 0..size {
        for j in i..size {
            let vs = [SympVector::from_index(p, n, i), SympVector::from_index(p, n, j)];
            let s = row_reduce_in(p, n, &vs).unwrap();
            if seen.insert(s.basis()) {
                out.push(s);
            }
        }
    }
    out
}

fn invariant_suites() -> Outcome {
    let start = Instant::now();
    let mut counts = [0usize; 4];
    for (p, max_n) in [(2u32, 4usize), (3, 2)] {
        for n in 1..=max_n {
            let size = (p as usize).pow(2 * n as u32);
            for sub in small_subspaces(p, n) {
                // dual involution
                ensure(
                    symplectic_dual(&symplectic_dual(&sub)) == sub,
                    format!("dual involution fails for {:?}", sub.basis()),
                )?;
                counts[0] += 1;
                if sub.dim() == 0 || !is_isotropic(&sub) {
                    continue;
                }
                // Witt extension is self-dual and contains the input
                let w = witt_extend(&sub).unwrap();
                ensure(symplectic_dual(&w) == w && sub.is_subspace_of(&w), "Witt extension not maximal isotropic")?;
                counts[1] += 1;
                // syndrome linearity over every vector, via the unit-vector syndromes
                let code = StabilizerCode::new(p, sub.basis()).unwrap();
                let units: Vec<Vec<u32>> = (0..2 * n)
                    .map(|j| {
                        let mut c = vec![0; 2 * n];
                        c[j] = 1;
                        code.syndrome_of(&SympVector::new(p, c).unwrap()).unwrap().entries().to_vec()
                    })
                    .collect();
                {
                    for i in 0..size {
                        let u = SympVector::from_index(p, n, i);
                        let mut expect = vec![0u32; code.r()];
                        for (coord, unit) in u.coords().iter().zip(&units) {
                            for (e, x) in expect.iter_mut().zip(unit) {
                                *e = (*e + coord * x) % p;
                            }
                        }
                        ensure(code.syndrome_of(&u).unwrap().entries() == expect.as_slice(), "syndrome not linear")?;
                    }
                    counts[2] += 1;
                }
            }
        }
    }
    // probability normalization: every point mass through every preset, plus random inputs
    // to every one-generator ternary code on two qudits
    for (_, code) in all_presets() {
        let proto = ConvertedProtocol::one_way(code.clone());
        for i in 0..(1usize << (2 * code.n())) {
            let u = SympVector::from_index(2, code.n(), i);
            let r = analyze(&proto, &BellDiagState::<f64>::point_mass(&u).unwrap()).unwrap();
            let total: f64 = r.records.iter().map(|x| x.probability).sum();
            ensure((total - 1.0).abs() < 1e-12, "probabilities do not sum to 1")?;
            counts[3] += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 1..81 {
        let g = SympVector::from_index(3, 2, i);
        let code = StabilizerCode::new(3, vec![g]).unwrap();
        let alpha = BellDiagState::<f64>::random(3, 2, &mut rng).unwrap();
        let r = analyze(&ConvertedProtocol::one_way(code), &alpha).unwrap();
        let total: f64 = r.records.iter().map(|x| x.probability).sum();
        ensure((total - 1.0).abs() < 1e-12, "ternary probabilities do not sum to 1")?;
        for rec in &r.records {
            let w: f64 = rec.output_weights.iter().sum();
            ensure(rec.probability == 0.0 || (w - 1.0).abs() < 1e-12, "output weights not normalized")?;
        }
        counts[3] += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(format!(
        "{} duals, {} Witt extensions, {} linearity sweeps, {} normalization runs, {secs:.1}s",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 measurement correlation identity", lemma1),
        ("3 bad-codeword overlap bound", lemma2),
        ("4 recurrence numbers at F = 0.75", recurrence_numbers),
        ("5 hashing yield", hashing),
        ("6 two-way yield ordering", yield_ordering),
        ("7 good set and fidelity bound", good_set_property),
        ("8 four-qubit encoding table", table1),
        ("9 invariant suites", invariant_suites),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
