use regsel_cli::svg::{render_snapshot, render_timeseries, PanelAxes};
use regsel_core::system::{step_system, SystemParams};
use regsel_core::universe::run;
use regsel_core::{EnergyPolicy, MetricsFrame, SystemRecord, UniverseConfig};

fn frame(step: u64, v: Option<f64>) -> MetricsFrame {
    MetricsFrame {
        step,
        alive_count: 10,
        delta_ave: v,
        rho_ratio: v,
        tau_ave: v,
        epsilon_ave: v,
        capacity_ave: v,
        deaths_this_step: 0,
    }
}

fn path_points(d: &str) -> Vec<(f64, f64)> {
    d.split(['M', 'L'])
        .filter(|s| !s.trim().is_empty())
        .map(|p| {
            let mut it = p.split_whitespace().map(|x| x.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

fn panel<'a>(doc: &'a roxmltree::Document, key: &str) -> roxmltree::Node<'a, 'a> {
    doc.descendants()
        .find(|n| n.attribute("id") == Some(&format!("panel-{key}")))
        .unwrap()
}

#[test]
fn single_frame_gives_one_marker_per_panel() {
    let svg = render_timeseries(&[frame(0, Some(0.4))]).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    for key in ["delta_ave", "rho_ratio", "tau_ave", "epsilon_ave"] {
        let p = panel(&doc, key);
        let markers = p
            .descendants()
            .filter(|n| n.attribute("class") == Some("marker"))
            .count();
        let series = p
            .descendants()
            .filter(|n| n.attribute("class") == Some("series"))
            .count();
        assert_eq!((markers, series), (1, 0), "{key}");
    }
}

#[test]
fn monotone_series_maps_to_monotone_path() {
    let frames: Vec<MetricsFrame> = (0..50).map(|i| frame(i, Some((i as f64).sqrt()))).collect();
    let svg = render_timeseries(&frames).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let p = panel(&doc, "delta_ave");
    let path = p
        .descendants()
        .find(|n| n.attribute("class") == Some("series"))
        .unwrap();
    let pts = path_points(path.attribute("d").unwrap());
    assert_eq!(pts.len(), 50);
    // increasing values move up the page
    assert!(pts.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1));
    let plot_w = PanelAxes::plot_w();
    assert!((pts[49].0 - pts[0].0 - plot_w).abs() < 1e-3);
}

#[test]
fn null_values_break_the_line() {
    let mut frames: Vec<MetricsFrame> = (0..10).map(|i| frame(i, Some(i as f64))).collect();
    frames[5].rho_ratio = None;
    let svg = render_timeseries(&frames).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let p = panel(&doc, "rho_ratio");
    let series = p
        .descendants()
        .filter(|n| n.attribute("class") == Some("series"))
        .count();
    assert_eq!(series, 2);
}

#[test]
fn default_run_renders_well_formed_svg() {
    let res = run(&UniverseConfig {
        seed: 4,
        snapshot_steps: vec![0, 10],
        ..Default::default()
    })
    .unwrap();
    let svg = render_timeseries(&res.frames).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
    for snap in &res.snapshots {
        let svg = render_snapshot(snap.step, &snap.population);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let alive = snap.population.iter().filter(|r| r.alive).count();
        let drawn = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("system"))
            .count();
        assert_eq!(drawn, alive);
    }
}

fn circles(doc: &roxmltree::Document, class: &str) -> Vec<(f64, String)> {
    doc.descendants()
        .filter(|n| n.attribute("class") == Some(class))
        .map(|n| {
            (
                n.attribute("r").unwrap().parse().unwrap(),
                n.attribute("fill").unwrap_or("").to_string(),
            )
        })
        .collect()
}

fn record(id: u64, delta: f64, rho: u8) -> SystemRecord {
    SystemRecord::new(
        id,
        SystemParams {
            delta,
            tau: 0.6,
            epsilon: 0.1,
            energy: 1.0,
            rho,
            s0: 1.0,
            s_crit: 3.0,
            r0: 0.0,
            drift: 0.3,
        },
    )
    .unwrap()
}

#[test]
fn bubble_radii_are_proportional_to_state_and_model() {
    // a perfect model after tracking for a while
    let mut rec = record(0, 1.0, 1);
    for step in 1..=4 {
        rec = step_system(&rec, step, 1.0, EnergyPolicy::Unbounded)
            .unwrap()
            .record;
    }
    assert!(rec.alive);
    let svg = render_snapshot(4, &[rec]);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let outer = circles(&doc, "state")[0].0;
    let inner = circles(&doc, "model")[0].0;
    assert!((inner / outer - rec.r / rec.s).abs() < 1e-12);
}

#[test]
fn agency_keys_the_fill_style() {
    let svg = render_snapshot(0, &[record(0, 0.5, 0), record(1, 0.5, 1)]);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let fills: Vec<String> = circles(&doc, "state").into_iter().map(|c| c.1).collect();
    assert_eq!(fills[0], "url(#dots)");
    assert!(fills[1].starts_with('#'));
    assert!(doc.descendants().any(|n| n.attribute("id") == Some("dots")));
    for n in doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("model"))
    {
        assert!(n.attribute("stroke-dasharray").is_some());
        assert_eq!(n.attribute("fill"), Some("none"));
    }
}

#[test]
fn late_snapshot_of_survivors_shows_close_model_rings() {
    let cfg = UniverseConfig {
        seed: 2,
        snapshot_steps: vec![163],
        ..Default::default()
    };
    let res = run(&cfg).unwrap();
    let snap = &res.snapshots[0];
    let alive: Vec<_> = snap.population.iter().filter(|r| r.alive).collect();
    assert!(!alive.is_empty());
    let svg = render_snapshot(snap.step, &snap.population);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let outer = circles(&doc, "state");
    let inner = circles(&doc, "model");
    let initial_mean_delta = res.frames[0].delta_ave.unwrap();
    let mut drawn = 0.0;
    let mut typical = 0.0;
    for (r, (o, i)) in alive.iter().zip(outer.iter().zip(&inner)) {
        assert!((i.0 / o.0 - r.r / r.s).abs() < 1e-12);
        drawn += i.0 / o.0;
        // ring ratio the same system would show with the population's initial mean delta
        typical += (r.r0 + initial_mean_delta * (r.s - r.s0)) / r.s;
    }
    assert!(drawn > typical, "{drawn} <= {typical}");
}

#[test]
fn empty_snapshot_is_annotated() {
    let mut rec = record(0, 0.5, 1);
    rec.alive = false;
    rec.death_step = Some(3);
    for pop in [vec![], vec![rec]] {
        let svg = render_snapshot(9, &pop);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert!(doc
            .descendants()
            .any(|n| n.attribute("class") == Some("empty")));
    }
}
