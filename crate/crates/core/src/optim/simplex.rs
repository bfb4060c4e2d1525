//! Nelder–Mead simplex minimisation.

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Initial edge length per coordinate.
    pub step: Vec<f64>,
    /// Stop when the spread of objective values is at most `f_tol · (1 + |f_best|)`
    /// and every vertex is within `x_tol` of the best one.
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(&a, &b)| a + t * (b - a)).collect()
}

fn clean(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn nelder_mead<F>(mut objective: F, start: &[f64], opts: &SimplexOptions) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    vertices.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += opts.step[i];
        vertices.push(v);
    }
    let mut values: Vec<f64> = vertices.iter().map(|v| clean(objective(v))).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        vertices = order.iter().map(|&i| vertices[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let (best, worst) = (values[0], values[dim]);
        let spread_ok = best.is_finite() && worst - best <= opts.f_tol * (1.0 + best.abs());
        let size_ok = vertices[1..].iter().all(|v| {
            v.iter()
                .zip(&vertices[0])
                .all(|(a, b)| (a - b).abs() <= opts.x_tol)
        });
        if spread_ok && size_ok {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|j| vertices[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let reflected = lerp(&centroid, &vertices[dim], -REFLECT);
        let f_reflected = clean(objective(&reflected));

        if f_reflected < values[0] {
            let expanded = lerp(&centroid, &vertices[dim], -EXPAND);
            let f_expanded = clean(objective(&expanded));
            if f_expanded < f_reflected {
                vertices[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                vertices[dim] = reflected;
                values[dim] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[dim - 1] {
            vertices[dim] = reflected;
            values[dim] = f_reflected;
            continue;
        }
        let (contracted, f_contracted) = if f_reflected < values[dim] {
            let c = lerp(&centroid, &reflected, CONTRACT);
            let fc = clean(objective(&c));
            (c, fc)
        } else {
            let c = lerp(&centroid, &vertices[dim], CONTRACT);
            let fc = clean(objective(&c));
            (c, fc)
        };
        if f_contracted < values[dim].min(f_reflected) {
            vertices[dim] = contracted;
            values[dim] = f_contracted;
            continue;
        }
        for i in 1..=dim {
            vertices[i] = lerp(&vertices[0], &vertices[i], SHRINK);
            values[i] = clean(objective(&vertices[i]));
        }
    }

    let best_index = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    SimplexOutcome {
        best: vertices[best_index].clone(),
        best_value: values[best_index],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(dim: usize) -> SimplexOptions {
        SimplexOptions {
            step: vec![0.5; dim],
            f_tol: 1e-14,
            x_tol: 1e-9,
            max_iter: 10_000,
        }
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = nelder_mead(f, &[-1.2, 1.0], &opts(2));
        assert!(out.converged);
        assert!((out.best[0] - 1.0).abs() < 1e-6);
        assert!((out.best[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn three_dimensional_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 4.0 * (x[1] + 2.0).powi(2) + 9.0 * (x[2] - 0.5).powi(2);
        let out = nelder_mead(f, &[0.0, 0.0, 0.0], &opts(3));
        assert!(out.converged);
        for (got, want) in out.best.iter().zip([1.0, -2.0, 0.5]) {
            assert!((got - want).abs() < 1e-7);
        }
    }

    #[test]
    fn respects_infinite_walls() {
        let f = |x: &[f64]| if x[0] > 2.0 { f64::INFINITY } else { -x[0] + x[1] * x[1] };
        let out = nelder_mead(f, &[0.0, 1.0], &opts(2));
        assert!(out.best[0] <= 2.0);
        assert!((out.best[0] - 2.0).abs() < 1e-6);
    }
}
