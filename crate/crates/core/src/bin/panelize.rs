//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 parse, 2 topology, 3 optimization, 4 rendering.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use panelize::bdf::{parse_bdf, BulkDeck};
use panelize::config::Config;
use panelize::global::{run_global_local, LoopInputs, LoopStatus};
use panelize::manifest::{read_manifest, write_manifest, Manifest, StiffenerRecord};
use panelize::mesh::ElementKind;
use panelize::render::{render_svg, ColorBy, RenderOptions};
use panelize::sizing::SmearedPlate;
use panelize::stiffener::{associate_stiffeners, chains_by_panel};
use panelize::{build_adjacency, decompose, DividingCurve};

#[derive(Parser)]
#[command(
    name = "panelize",
    version,
    about = "Split shell meshes into panels and size them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split the triangle skin of a deck into panels along dividing curves.
    Decompose {
        #[arg(long)]
        mesh: PathBuf,
        /// JSON list of node-ID arrays. Without it the skin is one panel.
        #[arg(long)]
        curves: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assign the quad stiffeners of a deck to the panels of a manifest.
    Stiffen {
        #[arg(long)]
        manifest: PathBuf,
        /// Deck holding the stiffener quads.
        #[arg(long)]
        mesh: PathBuf,
        /// Defaults to rewriting the input manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the global/local sizing loop.
    Optimize {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Skin deck; its coordinates give panel dimensions.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the decomposition as SVG.
    Render {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "panel")]
        color_by: ColorBy,
        #[arg(long, default_value_t = 1.0)]
        stroke_width: f64,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 600)]
        height: u32,
    },
    /// Summarize a deck and/or a manifest.
    Info {
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8) -> impl Fn(&dyn Display) -> Failure {
    move |e| Failure {
        code,
        message: e.to_string(),
    }
}

const PARSE: u8 = 1;
const TOPOLOGY: u8 = 2;
const OPTIMIZATION: u8 = 3;
const RENDERING: u8 = 4;

fn read_deck(path: &Path) -> Result<BulkDeck, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| fail(PARSE)(&format!("{}: {e}", path.display())))?;
    let deck = parse_bdf(&text).map_err(|e| fail(PARSE)(&format!("{}: {e}", path.display())))?;
    for w in &deck.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(deck)
}

fn load_manifest(path: &Path) -> Result<Manifest, Failure> {
    read_manifest(path).map_err(|e| fail(PARSE)(&e))
}

fn save_manifest(path: &Path, m: &Manifest) -> Result<(), Failure> {
    write_manifest(path, m).map_err(|e| fail(PARSE)(&e))
}

fn decompose_cmd(mesh: &Path, curves: Option<&Path>, out: &Path) -> Result<(), Failure> {
    let deck = read_deck(mesh)?;
    let skin = deck.mesh.of_kind(ElementKind::Tri);
    let curves: Vec<DividingCurve> = match curves {
        None => Vec::new(),
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| fail(PARSE)(&format!("{}: {e}", p.display())))?;
            let raw: Vec<Vec<u64>> = serde_json::from_str(&text)
                .map_err(|e| fail(PARSE)(&format!("{}: {e}", p.display())))?;
            raw.into_iter()
                .map(DividingCurve::from_ids)
                .collect::<Result<_, _>>()
                .map_err(|e| fail(TOPOLOGY)(&e))?
        }
    };
    let index = build_adjacency(&skin).map_err(|e| fail(TOPOLOGY)(&e))?;
    let panels = decompose(&index, &curves).map_err(|e| fail(TOPOLOGY)(&e))?;
    let manifest = Manifest {
        mesh: Some(mesh.display().to_string()),
        curves,
        ..Manifest::from_panels(&panels)
    };
    save_manifest(out, &manifest)?;
    let sizes: Vec<String> = panels
        .iter()
        .map(|p| p.elements.len().to_string())
        .collect();
    println!(
        "{} panels, elements {} = {}",
        panels.len(),
        sizes.join(" + "),
        panels.iter().map(|p| p.elements.len()).sum::<usize>()
    );
    Ok(())
}

fn stiffen_cmd(manifest_path: &Path, mesh: &Path, out: &Path) -> Result<(), Failure> {
    let mut manifest = load_manifest(manifest_path)?;
    let deck = read_deck(mesh)?;
    let quads = deck.mesh.of_kind(ElementKind::Quad);
    if quads.element_count() == 0 {
        println!("no stiffener quads; manifest unchanged");
        return save_manifest(out, &manifest);
    }
    let panels = manifest.panels().map_err(|e| fail(PARSE)(&e))?;
    let association = associate_stiffeners(&panels, &quads).map_err(|e| fail(TOPOLOGY)(&e))?;
    let chains = chains_by_panel(&association, &quads).map_err(|e| fail(TOPOLOGY)(&e))?;
    manifest.stiffeners = Some(StiffenerRecord::new(&association, &chains));
    save_manifest(out, &manifest)?;
    println!(
        "{} quads assigned in {} chains, {} ambiguous, {} unassigned",
        association
            .assignments
            .values()
            .map(|s| s.len())
            .sum::<usize>(),
        chains.values().map(Vec::len).sum::<usize>(),
        association.ambiguous.len(),
        association.unassigned.len()
    );
    Ok(())
}

fn optimize_cmd(
    manifest_path: &Path,
    config: &Path,
    mesh: Option<&Path>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: &Path,
) -> Result<(), Failure> {
    let mut manifest = load_manifest(manifest_path)?;
    let config = Config::read(config).map_err(|e| fail(PARSE)(&e))?;
    let deck = mesh.map(read_deck).transpose()?;
    let panels = manifest.panels().map_err(|e| fail(PARSE)(&e))?;
    let chains: BTreeMap<_, _> = match &manifest.stiffeners {
        Some(s) => panels.iter().map(|p| (p.id, s.chain_count(p.id))).collect(),
        None => BTreeMap::new(),
    };
    let specs = config
        .panel_specs(&panels, deck.as_ref().map(|d| &d.mesh), &chains)
        .map_err(|e| fail(PARSE)(&e))?;
    let mut loop_config = config.loop_config;
    if let Some(s) = seed {
        loop_config.seed = s;
    }
    loop_config.worker_count =
        workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let analyzer = SmearedPlate::default();
    let inputs = LoopInputs {
        panels: &specs,
        material: config.material,
        bounds: config.bounds,
        analyzer: &analyzer,
        optimizer: config.optimizer,
    };
    let mut provider = config.provider();
    let outcome = run_global_local(&inputs, provider.as_mut(), &loop_config)
        .map_err(|e| fail(OPTIMIZATION)(&e))?;
    manifest.set_outcome(&outcome);
    save_manifest(out, &manifest)?;
    for r in &outcome.history {
        match r.delta_pct {
            Some(d) => println!(
                "iteration {}: weight {:.6} kg, change {:.4} %",
                r.iteration, r.total_weight, d
            ),
            None => println!("iteration {}: weight {:.6} kg", r.iteration, r.total_weight),
        }
        for f in &r.constraints.global_flags {
            println!("  global: {f}");
        }
    }
    println!("status {:?}", outcome.status);
    match outcome.status {
        LoopStatus::Converged | LoopStatus::MaxIterations => Ok(()),
        LoopStatus::NotConvergedFeasibility | LoopStatus::ProviderFailed => Err(Failure {
            code: OPTIMIZATION,
            message: outcome
                .message
                .unwrap_or_else(|| "some panels have no feasible design within the bounds".into()),
        }),
    }
}

fn render_cmd(
    mesh: &Path,
    manifest: Option<&Path>,
    out: &Path,
    options: &RenderOptions,
) -> Result<(), Failure> {
    let deck = read_deck(mesh)?;
    let manifest = match manifest {
        Some(p) => load_manifest(p)?,
        None => Manifest::default(),
    };
    let svg = render_svg(&deck.mesh, &manifest, options).map_err(|e| fail(RENDERING)(&e))?;
    fs::write(out, svg).map_err(|e| fail(RENDERING)(&format!("{}: {e}", out.display())))
}

fn info_cmd(mesh: Option<&Path>, manifest: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = mesh {
        let deck = read_deck(path)?;
        let m = &deck.mesh;
        let tris = m.elements().filter(|e| e.kind == ElementKind::Tri).count();
        println!(
            "{}: {} nodes, {} tri, {} quad",
            path.display(),
            m.node_count(),
            tris,
            m.element_count() - tris
        );
        println!(
            "coordinates: {}",
            if m.has_coordinates() {
                "present"
            } else {
                "absent"
            }
        );
        let skin = m.of_kind(ElementKind::Tri);
        let index = build_adjacency(&skin).map_err(|e| fail(TOPOLOGY)(&e))?;
        println!(
            "skin edges: {}, free {}, non-manifold {}",
            index.edge_to_elements().len(),
            index.free_edges().count(),
            index.non_manifold_edges().count()
        );
        println!("warnings: {}", deck.warnings.len());
    }
    if let Some(path) = manifest {
        let m = load_manifest(path)?;
        println!(
            "{}: {} panels, {} curves",
            path.display(),
            m.panels.len(),
            m.curves.len()
        );
        for p in &m.panels {
            println!(
                "  panel {}: {} elements, {} boundary nodes",
                p.id,
                p.elements.len(),
                p.boundary.len()
            );
        }
        if let Some(s) = &m.stiffeners {
            println!(
                "stiffeners: {} panels, {} ambiguous, {} unassigned",
                s.assignments.len(),
                s.ambiguous.len(),
                s.unassigned.len()
            );
        }
        if let (Some(status), Some(last)) = (m.status, m.history.last()) {
            println!(
                "sizing: {status:?} after {} iterations, {:.6} kg",
                last.iteration, last.total_weight
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PANELIZE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decompose { mesh, curves, out } => decompose_cmd(mesh, curves.as_deref(), out),
        Command::Stiffen {
            manifest,
            mesh,
            out,
        } => stiffen_cmd(manifest, mesh, out.as_deref().unwrap_or(manifest)),
        Command::Optimize {
            manifest,
            config,
            mesh,
            seed,
            workers,
            out,
        } => optimize_cmd(
            manifest,
            config,
            mesh.as_deref(),
            *seed,
            *workers,
            out.as_deref().unwrap_or(manifest),
        ),
        Command::Render {
            mesh,
            manifest,
            out,
            color_by,
            stroke_width,
            width,
            height,
        } => render_cmd(
            mesh,
            manifest.as_deref(),
            out,
            &RenderOptions {
                color_by: *color_by,
                stroke_width: *stroke_width,
                width: *width,
                height: *height,
            },
        ),
        Command::Info { mesh, manifest } => info_cmd(mesh.as_deref(), manifest.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
