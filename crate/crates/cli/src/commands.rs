use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use knotfield::critical::{find_critical_set, index_histogram, morse_code, SeedingConfig};
use knotfield::curve::{discretize, make_curve, ChargeDiscretization, CurveParams, ParamCurve};
use knotfield::field::evaluate;
use knotfield::isosurface::{check_regular, extract_with_topology, morse_transition_gallery, IsosurfaceConfig};
use knotfield::linalg::Vec3;
use knotfield::planar::{axis_profile, bifurcation_threshold, contour_grid, d2phi_origin, planar_critical_points};
use knotfield::sweep::{conjecture_table, flatten_sweep, SweepConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::*;
use crate::output::{create, domain, io_failure, write_json, Failure, Report};

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Eval(a) => eval(cli, a),
        Command::Planar(a) => planar(cli, a),
        Command::Bifurcation(a) => bifurcation(cli, a),
        Command::Critical(a) => critical(cli, a, false),
        Command::MorseCode(a) => critical(cli, a, true),
        Command::Isosurface(a) => isosurface(cli, a),
        Command::Gallery(a) => gallery(cli, a),
        Command::Sweep(a) => sweep(cli, a),
        Command::Table(a) => table(cli, a),
    }
}

fn curve(a: &CurveArgs) -> Result<ParamCurve<f64>, Failure> {
    match &a.curve_file {
        Some(p) => {
            let f = File::open(p).map_err(|e| io_failure(p, e))?;
            ParamCurve::from_csv_reader(f).map_err(domain)
        }
        None => make_curve(a.curve, CurveParams { aspect: a.aspect, gamma: a.gamma }).map_err(domain),
    }
}

fn charges(a: &CurveArgs) -> Result<ChargeDiscretization<f64>, Failure> {
    discretize(&curve(a)?, a.n).map_err(domain)
}

fn seeding(f: &FinderArgs) -> Result<SeedingConfig<f64>, Failure> {
    let c = SeedingConfig {
        grid_resolution: f.grid,
        inflation: f.inflation,
        z_inflation: f.z_inflation,
        newton_max_iter: f.max_iter,
        tolerance_factor: f.tolerance,
        seeder: f.seeder,
        refine_depth: f.refine_depth,
        ..SeedingConfig::default()
    };
    c.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(c)
}

fn eval(cli: &Cli, a: &EvalArgs) -> Result<(), Failure> {
    let c = charges(&a.curve)?;
    let points: Vec<Vec3<f64>> = match (a.point, a.random) {
        (Some(p), _) => vec![Vec3::from(p)],
        (None, Some(k)) => {
            let (lo, hi) = c.bounds();
            let (lo, hi) = (lo - Vec3::splat(0.5), hi + Vec3::splat(0.5));
            let mut rng = ChaCha8Rng::seed_from_u64(cli.global.seed_rng);
            (0..k)
                .map(|_| Vec3::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y), rng.gen_range(lo.z..hi.z)))
                .collect()
        }
        (None, None) => return Err(Failure::usage("one of --point or --random is required")),
    };
    let evals = points.iter().map(|&p| evaluate(&c, p)).collect::<Result<Vec<_>, _>>().map_err(domain)?;
    if a.point.is_some() {
        write_json(None, &Report { config: cli, result: evals[0] })
    } else {
        #[derive(Serialize)]
        struct Many<T> {
            evaluations: T,
        }
        write_json(None, &Report { config: cli, result: Many { evaluations: evals } })
    }
}

fn planar(cli: &Cli, a: &PlanarArgs) -> Result<(), Failure> {
    let points = planar_critical_points(a.shape, a.aspect).map_err(domain)?;
    let d2 = d2phi_origin(a.shape, a.aspect).map_err(domain)?;
    if let Some(p) = &a.profile {
        let prof = axis_profile(a.shape, a.aspect, a.samples).map_err(domain)?;
        let mut w = csv_writer(p)?;
        w.write_record(["x", "phi"]).map_err(|e| csv_failure(p, e))?;
        for (x, phi) in prof.abscissae.iter().zip(&prof.phi_values) {
            w.write_record([x.to_string(), phi.to_string()]).map_err(|e| csv_failure(p, e))?;
        }
        w.flush().map_err(|e| io_failure(p, e))?;
    }
    if let Some(p) = &a.contour {
        let grid = contour_grid(a.shape, a.aspect, a.grid).map_err(domain)?;
        let mut w = csv_writer(p)?;
        w.write_record(["x", "y", "phi"]).map_err(|e| csv_failure(p, e))?;
        for (x, y, phi) in grid {
            w.write_record([x.to_string(), y.to_string(), phi.to_string()]).map_err(|e| csv_failure(p, e))?;
        }
        w.flush().map_err(|e| io_failure(p, e))?;
    }
    #[derive(Serialize)]
    struct Out<P> {
        zero_count: usize,
        d2phi_origin: f64,
        critical_points: P,
    }
    write_json(None, &Report { config: cli, result: Out { zero_count: points.len(), d2phi_origin: d2, critical_points: points } })
}

fn csv_writer(p: &Path) -> Result<csv::Writer<File>, Failure> {
    csv::Writer::from_path(p).map_err(|e| csv_failure(p, e))
}

fn csv_failure(p: &Path, e: csv::Error) -> Failure {
    Failure { code: 1, message: format!("csv error on {}: {e}", p.display()) }
}

fn bifurcation(cli: &Cli, a: &BifurcationArgs) -> Result<(), Failure> {
    let r = bifurcation_threshold::<f64>(a.shape).map_err(domain)?;
    write_json(None, &Report { config: cli, result: r })
}

fn critical(cli: &Cli, a: &CriticalArgs, code: bool) -> Result<(), Failure> {
    let c = charges(&a.curve)?;
    let cfg = seeding(&a.finder)?;
    let set = find_critical_set(&c, &cfg).map_err(domain)?;
    let h = index_histogram(&set.points);
    if code {
        #[derive(Serialize)]
        struct Out<M> {
            zero_count: usize,
            morse_code: M,
        }
        write_json(a.out.as_deref(), &Report { config: cli, result: Out { zero_count: set.points.len(), morse_code: morse_code(&set.points) } })
    } else {
        #[derive(Serialize)]
        struct Out<'a, P, S> {
            zero_count: usize,
            index_counts: [usize; 4],
            degenerate_count: usize,
            stats: &'a S,
            points: P,
        }
        let out = Out {
            zero_count: set.points.len(),
            index_counts: [h[0], h[1], h[2], h[3]],
            degenerate_count: h[4],
            stats: &set.stats,
            points: &set.points,
        };
        write_json(a.out.as_deref(), &Report { config: cli, result: out })
    }
}

fn isosurface(cli: &Cli, a: &IsosurfaceArgs) -> Result<(), Failure> {
    let c = charges(&a.curve)?;
    let critical = if a.check_regular {
        let cfg = SeedingConfig::with_grid(a.finder_grid);
        cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
        let set = find_critical_set(&c, &cfg).map_err(domain)?;
        check_regular(a.level, &set.points).map_err(domain)?;
        Some(set.points)
    } else {
        None
    };
    let cfg = IsosurfaceConfig { grid_resolution: a.grid, inflation: a.inflation, ..IsosurfaceConfig::default() };
    let (mesh, report) = extract_with_topology(&c, a.level, &cfg, critical.as_deref()).map_err(domain)?;
    let mut w = create(&a.out)?;
    mesh.write_obj(&mut w).and_then(|_| w.flush()).map_err(|e| io_failure(&a.out, e))?;
    #[derive(Serialize)]
    struct Out<R> {
        level: f64,
        vertex_count: usize,
        triangle_count: usize,
        topology: R,
    }
    let out = Out { level: a.level, vertex_count: mesh.vertices.len(), triangle_count: mesh.triangles.len(), topology: report };
    write_json(a.report.as_deref(), &Report { config: cli, result: out })
}

fn gallery(cli: &Cli, a: &GalleryArgs) -> Result<(), Failure> {
    let c = charges(&a.curve)?;
    let set = find_critical_set(&c, &seeding(&a.finder)?).map_err(domain)?;
    let cfg = IsosurfaceConfig::with_grid(a.iso_grid);
    let entries = morse_transition_gallery(&c, &set.points, &cfg).map_err(domain)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| io_failure(&a.out_dir, e))?;
    #[derive(Serialize)]
    struct Level<'a, R> {
        file: String,
        level: f64,
        genus: i64,
        component_count: usize,
        topology: &'a R,
    }
    let mut levels = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let file = format!("level_{i:02}.obj");
        let path = a.out_dir.join(&file);
        let mut w = create(&path)?;
        e.mesh.write_obj(&mut w).and_then(|_| w.flush()).map_err(|err| io_failure(&path, err))?;
        levels.push(Level { file, level: e.level, genus: e.topology.total_genus, component_count: e.topology.component_count, topology: &e.topology });
    }
    #[derive(Serialize)]
    struct Out<'a, M, L> {
        morse_code: M,
        levels: &'a L,
    }
    let out = Out { morse_code: morse_code(&set.points), levels: &levels };
    write_json(Some(&a.out_dir.join("gallery.json")), &Report { config: cli, result: &out })?;
    write_json(None, &Report { config: cli, result: out })
}

fn sweep_config(grid: usize, schedule: knotfield::Schedule) -> SweepConfig<f64> {
    let mut cfg = SweepConfig::<f64> { schedule, ..SweepConfig::default() };
    cfg.finder.grid_resolution = grid;
    cfg
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Result<(), Failure> {
    let mut cfg = sweep_config(a.grid, a.schedule);
    cfg.min_samples = a.min_samples;
    cfg.max_samples = a.max_samples;
    cfg.max_refine_depth = a.max_refine_depth;
    let result = flatten_sweep(a.curve, a.gamma_start, a.gamma_end, a.steps, &cfg).map_err(domain)?;
    let mut w = csv_writer(&a.out)?;
    w.write_record(["gamma", "zero_count", "index1_count", "index2_count", "flags"]).map_err(|e| csv_failure(&a.out, e))?;
    for r in &result.records {
        let flags: Vec<String> = r.flags.iter().map(|f| f.to_string()).collect();
        w.write_record([
            r.gamma.to_string(),
            r.zero_count.to_string(),
            r.index_histogram[1].to_string(),
            r.index_histogram[2].to_string(),
            flags.join(";"),
        ])
        .map_err(|e| csv_failure(&a.out, e))?;
    }
    w.flush().map_err(|e| io_failure(&a.out, e))?;
    if let Some(p) = &a.records {
        write_json(Some(p), &Report { config: cli, result: &result })?;
    }
    #[derive(Serialize)]
    struct Out<B, G> {
        knot: knotfield::CurveKind,
        record_count: usize,
        flagged_records: usize,
        min_zero_count: usize,
        argmin_gamma_range: (f64, f64),
        bound_check: B,
        odd_jumps: G,
    }
    let out = Out {
        knot: result.knot,
        record_count: result.records.len(),
        flagged_records: result.records.iter().filter(|r| r.is_flagged()).count(),
        min_zero_count: result.min_zero_count,
        argmin_gamma_range: result.argmin_gamma_range,
        bound_check: result.bound_check,
        odd_jumps: &result.odd_jumps,
    };
    write_json(None, &Report { config: cli, result: out })
}

fn table(cli: &Cli, a: &TableArgs) -> Result<(), Failure> {
    let cfg = sweep_config(a.grid, a.schedule);
    let rows = conjecture_table(a.gamma_end, a.steps, &cfg).map_err(domain)?;
    #[derive(Serialize)]
    struct Out<R> {
        rows: R,
    }
    write_json(Some(&a.out), &Report { config: cli, result: Out { rows: &rows } })?;
    let mut out = std::io::stdout().lock();
    let io = |e| io_failure(Path::new("<stdout>"), e);
    writeln!(out, "{:<14} {:>6} {:>9} {:>12} {:>6}  {:<5} {}", "knot", "2t+1", "observed", "conjectured", "2c+1", "pass", "gamma at min").map_err(io)?;
    for r in &rows {
        writeln!(
            out,
            "{:<14} {:>6} {:>9} {:>12} {:>6}  {:<5} {:.4}..{:.4}",
            r.knot.name(),
            r.lower_bound,
            r.observed_min,
            r.conjectured,
            r.upper_bound,
            if r.pass { "yes" } else { "NO" },
            r.argmin_gamma_range.0,
            r.argmin_gamma_range.1
        )
        .map_err(io)?;
    }
    Ok(())
}
