//! Worker-pool grid evaluation. Indices are split into contiguous chunks,
//! one per worker; results are reassembled in index order, so the output is
//! identical for any worker count.

use pbih_core::expr::Bindings;
use pbih_core::grid::Grid;
use pbih_core::report::{PointRecord, SkippedPoint, SurfacePlan};
use pbih_core::residuals::ProblemConfig;

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn evaluate_grid(
    plan: &SurfacePlan,
    cfg: &ProblemConfig,
    grid: &Grid,
    workers: usize,
) -> (Vec<PointRecord>, Vec<SkippedPoint>) {
    let total = grid.len();
    let workers = workers.max(1).min(total.max(1));
    let mut outcomes: Vec<Option<Result<PointRecord, SkippedPoint>>> = Vec::new();
    outcomes.resize_with(total, || None);

    if workers == 1 {
        let extra = Bindings::new();
        for (i, slot) in outcomes.iter_mut().enumerate() {
            let u = grid.point(i);
            *slot = Some(match plan.evaluate_point(cfg, &u, &extra) {
                Ok(rec) => Ok(rec),
                Err(reason) => Err(SkippedPoint { u, reason }),
            });
        }
    } else {
        let chunk = total.div_ceil(workers);
        let mut slices: Vec<&mut [Option<Result<PointRecord, SkippedPoint>>]> = Vec::new();
        let mut rest = outcomes.as_mut_slice();
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            slices.push(head);
            rest = tail;
        }
        std::thread::scope(|scope| {
            for (w, slice) in slices.into_iter().enumerate() {
                let start = w * chunk;
                scope.spawn(move || {
                    let extra = Bindings::new();
                    for (offset, slot) in slice.iter_mut().enumerate() {
                        let u = grid.point(start + offset);
                        *slot = Some(match plan.evaluate_point(cfg, &u, &extra) {
                            Ok(rec) => Ok(rec),
                            Err(reason) => Err(SkippedPoint { u, reason }),
                        });
                    }
                });
            }
        });
    }

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for slot in outcomes {
        match slot.expect("every index evaluated") {
            Ok(rec) => records.push(rec),
            Err(sk) => skipped.push(sk),
        }
    }
    (records, skipped)
}
