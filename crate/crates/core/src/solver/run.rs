use crate::solver::{Field, Frame, Scheme, SolverError};

/// One row of the per-step time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub time: f64,
    pub mass: f64,
    pub sup_norm: f64,
    /// Step that produced this row (0 for the initial row).
    pub dt: f64,
    /// Mass that has left the box since the start.
    pub cum_flux: f64,
}

/// Everything recorded while evolving one field.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub frame: Frame,
    /// Fields at the requested snapshot times, in order.
    pub snapshots: Vec<Field>,
    pub series: Vec<SeriesRow>,
    /// Field at the end time.
    pub last: Field,
    /// Largest `|Δmass + outflow|` over single steps, relative to the
    /// initial mass (absolute when the initial mass is zero).
    pub max_identity_defect: f64,
    /// Node-steps at which outgoing fluxes were scaled to keep values nonnegative.
    pub limited_nodes: usize,
    pub clipped_nodes: usize,
    pub clipped_mass: f64,
    pub steps: usize,
}

impl RunRecord {
    pub fn initial_mass(&self) -> f64 {
        self.series[0].mass
    }

    /// `max_t |mass(t) − mass(0)| / mass(0)`.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.initial_mass();
        let scale = if m0 > 0.0 { m0 } else { 1.0 };
        self.series
            .iter()
            .map(|r| (r.mass - m0).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// Mass that has left the box by the end of the run, relative to the
    /// initial mass.
    pub fn outflow_fraction(&self) -> f64 {
        let m0 = self.initial_mass();
        let scale = if m0 > 0.0 { m0 } else { 1.0 };
        self.series.last().map_or(0.0, |r| r.cum_flux / scale)
    }

    /// Snapshot whose time matches `t` to within a relative `1e-9`.
    pub fn snapshot_at(&self, t: f64) -> Option<&Field> {
        self.snapshots
            .iter()
            .find(|f| (f.time() - t).abs() <= 1e-9 * t.abs().max(1.0))
    }

    /// CSV with header `time,mass,sup_norm,dt,cum_flux`.
    pub fn series_csv(&self) -> String {
        let mut s = String::from("time,mass,sup_norm,dt,cum_flux\n");
        for r in &self.series {
            s.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e}\n",
                r.time, r.mass, r.sup_norm, r.dt, r.cum_flux
            ));
        }
        s
    }
}

/// Evolves `initial` from its own time to `t_end`, landing exactly on every
/// entry of `snapshot_times`.
pub fn run(
    scheme: &Scheme,
    initial: Field,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<RunRecord, SolverError> {
    let mut v = run_lockstep(scheme, vec![initial], t_end, snapshot_times)?;
    Ok(v.pop().unwrap())
}

/// Evolves several fields with a shared step `min_k stable_dt(field_k)`, so
/// that order relations between them are preserved exactly by the scheme.
///
/// All fields must start at the same time.
pub fn run_lockstep(
    scheme: &Scheme,
    initials: Vec<Field>,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<Vec<RunRecord>, SolverError> {
    let Some(first) = initials.first() else {
        return Err(SolverError::Empty);
    };
    let t0 = first.time();
    if initials.iter().any(|f| f.time() != t0) {
        return Err(SolverError::SnapshotTimes(
            "fields in a lockstep run must share their start time".into(),
        ));
    }
    if !(t_end >= t0) || !t_end.is_finite() {
        return Err(SolverError::EndBeforeStart {
            start: t0,
            end: t_end,
        });
    }
    validate_times(snapshot_times, t0, t_end)?;

    let mut records: Vec<RunRecord> = initials
        .iter()
        .map(|f| RunRecord {
            frame: f.frame(),
            snapshots: Vec::new(),
            series: vec![SeriesRow {
                time: t0,
                mass: f.mass(),
                sup_norm: f.sup_norm(),
                dt: 0.0,
                cum_flux: 0.0,
            }],
            last: f.clone(),
            max_identity_defect: 0.0,
            limited_nodes: 0,
            clipped_nodes: 0,
            clipped_mass: 0.0,
            steps: 0,
        })
        .collect();
    let mut fields = initials;
    let mut t = t0;
    let mut next_snap = 0;
    let mut cum = vec![0.0; fields.len()];
    loop {
        while next_snap < snapshot_times.len() && snapshot_times[next_snap] <= t {
            for (rec, f) in records.iter_mut().zip(&fields) {
                rec.snapshots.push(f.clone().with_time(snapshot_times[next_snap]));
            }
            next_snap += 1;
        }
        if t >= t_end {
            break;
        }
        let target = snapshot_times
            .get(next_snap)
            .copied()
            .unwrap_or(t_end)
            .min(t_end);
        let mut dt = fields
            .iter()
            .map(|f| scheme.stable_dt(f))
            .fold(f64::INFINITY, f64::min);
        let landing = t + dt >= target - 1e-12 * target.abs().max(1.0);
        if landing {
            dt = target - t;
        }
        for (k, f) in fields.iter_mut().enumerate() {
            let before = records[k].series.last().unwrap().mass;
            let out = scheme.step(f, dt)?;
            let mut next = out.field;
            if landing {
                next = next.with_time(target);
            }
            let mass = next.mass();
            let rec = &mut records[k];
            let m0 = rec.series[0].mass;
            let scale = if m0 > 0.0 { m0 } else { 1.0 };
            rec.max_identity_defect = rec
                .max_identity_defect
                .max((mass - before + out.outflow).abs() / scale);
            rec.limited_nodes += out.limited;
            rec.clipped_nodes += out.clipped;
            rec.clipped_mass += out.clipped_mass;
            rec.steps += 1;
            cum[k] += out.outflow;
            rec.series.push(SeriesRow {
                time: next.time(),
                mass,
                sup_norm: next.sup_norm(),
                dt,
                cum_flux: cum[k],
            });
            *f = next;
        }
        t = if landing { target } else { t + dt };
    }
    for (rec, f) in records.iter_mut().zip(fields) {
        rec.last = f;
    }
    Ok(records)
}

fn validate_times(times: &[f64], t0: f64, t_end: f64) -> Result<(), SolverError> {
    for (k, &s) in times.iter().enumerate() {
        if !s.is_finite() || s < t0 || s > t_end {
            return Err(SolverError::SnapshotTimes(format!(
                "{s} lies outside [{t0}, {t_end}]"
            )));
        }
        if k > 0 && s <= times[k - 1] {
            return Err(SolverError::SnapshotTimes(
                "times must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}
