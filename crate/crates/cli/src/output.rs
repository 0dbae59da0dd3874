//! Document rendering. Every float is written with `{:e}` — the shortest
//! scientific form that parses back to the identical bits — so emitted CSV
//! and JSON round-trip exactly and identical runs are byte-identical.

use optomech::cooling::{Mode, MomentState, Trajectory};
use optomech::sweep::{SweepTrace, ThresholdMap};

pub fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn push_record(w: &mut csv::Writer<Vec<u8>>, record: &[String]) {
    w.write_record(record).expect("in-memory CSV write");
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

/// Sweep traces as one CSV document. `curve` (the varied family value) is
/// prepended only when some trace carries one; the `direction` column is
/// present exactly for hysteresis (power) sweeps. Root columns hold up to
/// three branches sorted by photon number, empty when absent.
pub fn sweep_csv(curves: &[(Option<f64>, SweepTrace)]) -> String {
    let multi = curves.iter().any(|(label, _)| label.is_some());
    let directed = curves.iter().any(|(_, t)| t.direction.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());

    let mut header: Vec<String> = Vec::new();
    if multi {
        header.push("curve".into());
    }
    if directed {
        header.push("direction".into());
    }
    header.extend(
        [
            "control_value",
            "root1_n",
            "root2_n",
            "root3_n",
            "followed_n",
            "root1_stable",
            "root2_stable",
            "root3_stable",
        ]
        .map(String::from),
    );
    push_record(&mut w, &header);

    for (label, trace) in curves {
        for s in &trace.samples {
            let mut row: Vec<String> = Vec::new();
            if multi {
                row.push(label.map(fmt).unwrap_or_default());
            }
            if directed {
                row.push(
                    trace
                        .direction
                        .map(|d| d.label().to_string())
                        .unwrap_or_default(),
                );
            }
            row.push(fmt(s.control_value));
            for i in 0..3 {
                row.push(s.roots.get(i).map(|r| fmt(r.n)).unwrap_or_default());
            }
            row.push(fmt(s.followed_n));
            for i in 0..3 {
                row.push(
                    s.roots
                        .get(i)
                        .map(|r| r.stable.to_string())
                        .unwrap_or_default(),
                );
            }
            push_record(&mut w, &row);
        }
    }
    finish(w)
}

/// Threshold map as CSV rows ordered by detuning (outer) then decay (inner);
/// non-bistable cells are empty.
pub fn map_csv(map: &ThresholdMap) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    push_record(
        &mut w,
        &["delta_at_over_gamma", "kC_over_omega_m", "P_th_watts"].map(String::from),
    );
    for (i, &delta) in map.delta_at_over_gamma.iter().enumerate() {
        for (j, &k_c) in map.k_c_over_omega_m.iter().enumerate() {
            push_record(
                &mut w,
                &[
                    fmt(delta),
                    fmt(k_c),
                    map.cells[i][j].map(fmt).unwrap_or_default(),
                ],
            );
        }
    }
    finish(w)
}

/// Trajectory samples as CSV: time in units of 1/ω_m, then the four mode
/// occupancies.
pub fn cool_csv(traj: &Trajectory) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    push_record(
        &mut w,
        &["t_omega_m", "n_b", "n_a", "n_c", "n_d"].map(String::from),
    );
    for s in &traj.states {
        push_record(&mut w, &occupancy_row(s));
    }
    finish(w)
}

fn occupancy_row(s: &MomentState) -> [String; 5] {
    [
        fmt(s.t),
        fmt(s.occupancy(Mode::Mirror)),
        fmt(s.occupancy(Mode::CavityA)),
        fmt(s.occupancy(Mode::CavityC)),
        fmt(s.occupancy(Mode::Atom)),
    ]
}
