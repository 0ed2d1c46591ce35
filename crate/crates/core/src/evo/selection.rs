//! Ideal/nadir normalization and reference-vector environmental selection.

use alloc::vec::Vec;

use super::{nondominated_sort, Individual, Population, ReferenceVectorSet};

/// Componentwise minimum.
pub fn ideal_point<V: AsRef<[f64]>>(objs: &[V]) -> Vec<f64> {
    fold_components(objs, f64::INFINITY, f64::min)
}

/// Componentwise maximum. Callers pass the first front.
pub fn nadir_point<V: AsRef<[f64]>>(front: &[V]) -> Vec<f64> {
    fold_components(front, f64::NEG_INFINITY, f64::max)
}

fn fold_components<V: AsRef<[f64]>>(objs: &[V], init: f64, f: fn(f64, f64) -> f64) -> Vec<f64> {
    let m = objs.first().map_or(0, |o| o.as_ref().len());
    let mut out = alloc::vec![init; m];
    for o in objs {
        for (acc, v) in out.iter_mut().zip(o.as_ref()) {
            *acc = f(*acc, *v);
        }
    }
    out
}

/// `(f - ideal) / (nadir - ideal)`; components whose range is below `1e-12`
/// map to 0.
pub fn normalize_objectives<V: AsRef<[f64]>>(
    objs: &[V],
    ideal: &[f64],
    nadir: &[f64],
) -> Vec<Vec<f64>> {
    objs.iter()
        .map(|o| {
            o.as_ref()
                .iter()
                .zip(ideal.iter().zip(nadir))
                .map(|(f, (lo, hi))| {
                    let range = hi - lo;
                    if range < 1e-12 {
                        0.0
                    } else {
                        (f - lo) / range
                    }
                })
                .collect()
        })
        .collect()
}

/// Nearest reference vector of a translated objective vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    pub vector: usize,
    /// Perpendicular distance to the reference line.
    pub distance: f64,
    /// Length of the projection onto the reference vector.
    pub projection: f64,
}

/// Minimum-angle association. For non-negative points and vectors the
/// smallest angle is the smallest perpendicular distance; ties go to the lower
/// vector index, and a point at the origin associates with vector 0.
pub fn associate(point: &[f64], refs: &ReferenceVectorSet) -> Association {
    let norm_sq: f64 = point.iter().map(|v| v * v).sum();
    let mut best = Association {
        vector: 0,
        distance: f64::INFINITY,
        projection: 0.0,
    };
    for (k, w) in refs.vectors().iter().enumerate() {
        let proj: f64 = point.iter().zip(w).map(|(a, b)| a * b).sum();
        let distance = libm::sqrt((norm_sq - proj * proj).max(0.0));
        if distance < best.distance {
            best = Association {
                vector: k,
                distance,
                projection: proj,
            };
        }
    }
    best
}

/// Truncates `pop` to `n` members: whole fronts in rank order, then the
/// partially admitted front is filled by reference-vector niching. Objectives
/// are translated by the ideal point and scaled by the first-front nadir; each
/// candidate is associated with its minimum-angle vector, and picks go to the
/// least-crowded vector (ties: lowest vector index), taking its candidate with
/// the smallest perpendicular distance (ties: lowest population index).
/// Survivors keep their relative population order.
pub fn environmental_selection(pop: Population, refs: &ReferenceVectorSet, n: usize) -> Population {
    if pop.len() <= n {
        return Population::new(pop.members, n);
    }
    let objs = pop.objectives();
    let fronts = nondominated_sort(&objs);

    let mut chosen = alloc::vec![false; pop.len()];
    let mut selected = Vec::with_capacity(n);
    let mut partial: &[usize] = &[];
    for front in &fronts {
        if selected.len() + front.len() <= n {
            for &i in front {
                chosen[i] = true;
                selected.push(i);
            }
            if selected.len() == n {
                break;
            }
        } else {
            partial = front;
            break;
        }
    }

    if selected.len() < n {
        let ideal = ideal_point(&objs);
        let first: Vec<&[f64]> = fronts[0].iter().map(|&i| objs[i]).collect();
        let nadir = nadir_point(&first);

        let mut niche = alloc::vec![0usize; refs.len()];
        for &i in &selected {
            let p = &normalize_objectives(&[objs[i]], &ideal, &nadir)[0];
            niche[associate(p, refs).vector] += 1;
        }
        // Per vector: (distance, population index), sorted so the front is next.
        let mut candidates: Vec<Vec<(f64, usize)>> = alloc::vec![Vec::new(); refs.len()];
        for &i in partial {
            let p = &normalize_objectives(&[objs[i]], &ideal, &nadir)[0];
            let a = associate(p, refs);
            candidates[a.vector].push((a.distance, i));
        }
        for c in &mut candidates {
            c.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            c.reverse();
        }
        while selected.len() < n {
            let k = (0..refs.len())
                .filter(|&k| !candidates[k].is_empty())
                .min_by_key(|&k| (niche[k], k))
                .expect("partial front holds enough candidates");
            let (_, i) = candidates[k].pop().expect("non-empty");
            chosen[i] = true;
            selected.push(i);
            niche[k] += 1;
        }
    }

    let members: Vec<Individual> = pop
        .members
        .into_iter()
        .zip(chosen)
        .filter_map(|(m, keep)| keep.then_some(m))
        .collect();
    Population::new(members, n)
}
