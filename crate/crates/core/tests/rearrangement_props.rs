use fracopt::{
    decreasing_rearrangement, distribution_function, equimeasurable, linear_maximize,
    linear_minimize, majorizes, steiner_symmetrize, symmetry_error, verify_characterization,
    CellFunction, Grid, WeightClass,
};
use proptest::prelude::*;

fn values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..max_len)
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #[test]
    fn hardy_littlewood_for_sorted_sequences(pair in (1usize..40).prop_flat_map(|n| {
        (prop::collection::vec(0u8..20, n), prop::collection::vec(0u8..20, n))
    })) {
        let u: Vec<f64> = pair.0.iter().map(|&x| x as f64).collect();
        let v: Vec<f64> = pair.1.iter().map(|&x| x as f64).collect();
        prop_assert!(dot(&u, &v) <= dot(&sorted_desc(&u), &sorted_desc(&v)));
    }

    #[test]
    fn rearrangement_commutes_with_increasing_maps(f in values(30)) {
        let fc = CellFunction::new(f.clone(), 0.1);
        let star = decreasing_rearrangement(&fc);
        for psi in [|t: f64| t * t * t, f64::exp] {
            let composed = decreasing_rearrangement(&fc.map(psi));
            let mapped: Vec<f64> = star.values().iter().map(|&t| psi(t)).collect();
            prop_assert_eq!(composed.values(), mapped.as_slice());
            prop_assert_eq!(composed.breakpoints(), star.breakpoints());
        }
    }

    #[test]
    fn rearrangement_preserves_norms_and_extremes(f in values(30)) {
        let m = 0.25;
        let fc = CellFunction::new(f.clone(), m);
        let star = decreasing_rearrangement(&fc);
        prop_assert_eq!(star.values()[0], fc.max());
        prop_assert_eq!(*star.values().last().unwrap(), fc.min());
        for p in [1.0, 2.0, 3.5] {
            let direct: f64 = f.iter().map(|x| x.abs().powf(p)).sum::<f64>() * m;
            let steps: f64 = star
                .values()
                .iter()
                .zip(star.breakpoints().windows(2))
                .map(|(v, b)| v.abs().powf(p) * (b[1] - b[0]))
                .sum();
            prop_assert!((direct - steps).abs() <= 1e-9 * direct.max(1.0));
        }
        prop_assert!((star.integral_to(star.domain_length()) - fc.integral()).abs() < 1e-9);
    }

    #[test]
    fn distribution_matches_rearrangement(f in values(30), t in -11.0f64..11.0) {
        let fc = CellFunction::new(f, 0.5);
        let star = decreasing_rearrangement(&fc);
        prop_assert!((distribution_function(&fc, t) - star.distribution(t)).abs() < 1e-12);
    }

    #[test]
    fn linear_maximizer_is_monotone_coupling(
        data in (1usize..30).prop_flat_map(|n| (values(n + 1).prop_map(move |v| v), prop::collection::vec(-1.0f64..1.0, n)))
    ) {
        let (vals, u) = data;
        let n = u.len();
        let vals: Vec<f64> = vals.into_iter().cycle().take(n).collect();
        let class = WeightClass::of(&CellFunction::new(vals, 1.0));
        let uc = CellFunction::new(u.clone(), 1.0);
        let hi = linear_maximize(&class, &uc).unwrap();
        let lo = linear_minimize(&class, &uc).unwrap();
        prop_assert!(class.contains(&hi) && class.contains(&lo));
        prop_assert!(verify_characterization(&hi, &uc).unwrap());
        prop_assert!(verify_characterization(&lo.scaled(-1.0), &uc).unwrap());
        prop_assert!(dot(lo.values(), &u) <= dot(hi.values(), &u));
    }

    #[test]
    fn hull_elements_are_majorized(f in values(20), a in 0.0f64..1.0, shift in 0usize..20) {
        let m = 0.1;
        let n = f.len();
        let fc = CellFunction::new(f.clone(), m);
        let mut p = f.clone();
        p.rotate_left(shift % n);
        let mut q = f.clone();
        q.reverse();
        let g: Vec<f64> = p.iter().zip(&q).map(|(x, y)| a * x + (1.0 - a) * y).collect();
        let gc = CellFunction::new(g, m);
        prop_assert!(majorizes(&fc, &gc).unwrap());
        prop_assert!(majorizes(&fc, &CellFunction::new(p.clone(), m)).unwrap());
        prop_assert!(equimeasurable(&fc, &CellFunction::new(p, m)).unwrap());
    }

    #[test]
    fn steiner_symmetrization_properties(v in prop::collection::vec(0.0f64..5.0, 48)) {
        let grid = Grid::rectangle([2.0, 1.5], [8, 6]).unwrap();
        let u = CellFunction::on(&grid, v).unwrap();
        let sym = steiner_symmetrize(&grid, &u).unwrap();
        prop_assert!(equimeasurable(&u, &sym).unwrap());
        prop_assert_eq!(symmetry_error(&grid, &sym).unwrap(), 0.0);
        prop_assert_eq!(&steiner_symmetrize(&grid, &sym).unwrap(), &sym);
        // values do not increase with distance from the reflection line
        let center = grid.steiner_axis().unwrap().center;
        for a in 0..grid.active_count() {
            for b in 0..grid.active_count() {
                let (ca, cb) = (grid.center(a), grid.center(b));
                if ca[1] == cb[1] && (ca[0] - center).abs() < (cb[0] - center).abs() {
                    prop_assert!(sym.values()[a] >= sym.values()[b]);
                }
            }
        }
    }
}

#[test]
fn disk_symmetrization_is_line_wise() {
    let grid = Grid::disk(1.0, 10).unwrap();
    let u = CellFunction::from_fn(&grid, |[x, y]| (3.0 * x + y).sin() + 1.0);
    let sym = steiner_symmetrize(&grid, &u).unwrap();
    for line in grid.steiner_lines().unwrap() {
        let before: Vec<f64> = sorted_desc(&line.iter().map(|&c| u.values()[c]).collect::<Vec<_>>());
        let after: Vec<f64> = sorted_desc(&line.iter().map(|&c| sym.values()[c]).collect::<Vec<_>>());
        assert_eq!(before, after);
    }
    assert_eq!(symmetry_error(&grid, &sym).unwrap(), 0.0);
}
