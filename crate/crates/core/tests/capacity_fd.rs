use std::f64::consts::PI;

use widthlab::capacity::{
    planar_capacity_fd, product_capacity, Cell, PlanarCondenserGrid, ReinhardtCondenser,
    SolverOptions,
};
use widthlab::Error;

#[test]
fn annulus_1024_within_one_percent() {
    let grid = PlanarCondenserGrid::annulus(1.0, 0.5, 1024).unwrap();
    let sol = planar_capacity_fd(&grid, &SolverOptions::default()).unwrap();
    let exact = 2.0 * PI / 2f64.ln();
    let rel = (sol.capacity.value / exact - 1.0).abs();
    println!(
        "annulus 1024^2: {:.6} vs {exact:.6} (rel {rel:.2e}), {} iterations, residual {:.1e}, spread {:.1e}",
        sol.capacity.value,
        sol.iterations,
        sol.residual,
        sol.flux_spread()
    );
    assert!(rel < 0.01);
    assert!(sol.residual < 1e-10);
    assert!(sol.flux_spread() <= 10.0 * (sol.residual + grid.spacing()));
}

#[test]
fn square_around_disc_is_between_annuli() {
    let grid = PlanarCondenserGrid::square_with_disc(2.0, 0.5, 256).unwrap();
    let sol = planar_capacity_fd(&grid, &SolverOptions::default()).unwrap();
    // inscribed disc radius 1 and circumscribed radius √2
    let inner =
        product_capacity(&ReinhardtCondenser::new(vec![2f64.sqrt()], vec![0.5]).unwrap()).value;
    let outer = product_capacity(&ReinhardtCondenser::new(vec![1.0], vec![0.5]).unwrap()).value;
    assert!(
        (6.04..=9.07).contains(&sol.capacity.value),
        "{}",
        sol.capacity.value
    );
    assert!(inner < sol.capacity.value && sol.capacity.value < outer);
}

#[test]
fn thin_shell_is_a_geometry_error() {
    let e = PlanarCondenserGrid::from_fn(64, 64, 1.0 / 32.0, (-1.0, -1.0), |x, y| {
        let r = x.hypot(y);
        if r >= 0.95 {
            Cell::Outside
        } else if r >= 0.92 {
            Cell::Domain
        } else {
            Cell::Compact
        }
    })
    .unwrap_err();
    assert!(matches!(e, Error::Geometry(_)));
}

#[test]
fn nested_domains_decrease_capacity() {
    // D_j = {|z| < 1 + 1/j} on a common grid; capacity increases as D_j shrinks
    let n = 320;
    let half = 2.0;
    let h = 2.0 * half / n as f64;
    let mut prev = 0.0;
    for j in [1.0, 2.0, 4.0, 8.0] {
        let a = 1.0 + 1.0 / j;
        let grid = PlanarCondenserGrid::from_fn(n, n, h, (-half, -half), |x, y| {
            let r = x.hypot(y);
            if r <= 0.5 {
                Cell::Compact
            } else if r < a {
                Cell::Domain
            } else {
                Cell::Outside
            }
        })
        .unwrap();
        let v = planar_capacity_fd(&grid, &SolverOptions::default())
            .unwrap()
            .capacity
            .value;
        let closed = product_capacity(&ReinhardtCondenser::new(vec![a], vec![0.5]).unwrap()).value;
        assert!(v > prev);
        assert!((v / closed - 1.0).abs() < 0.03, "j = {j}: {v} vs {closed}");
        prev = v;
    }
}

#[test]
fn grid_file_round_trip_solves_identically() {
    let grid = PlanarCondenserGrid::annulus(1.0, 0.4, 80).unwrap();
    let back = PlanarCondenserGrid::parse(&grid.to_text()).unwrap();
    let a = planar_capacity_fd(&grid, &SolverOptions::default()).unwrap();
    let b = planar_capacity_fd(&back, &SolverOptions::default()).unwrap();
    assert_eq!(a.capacity.value.to_bits(), b.capacity.value.to_bits());
}
