use std::f64::consts::PI;

use miura_core::integral::{borel_pompeiu_residual, im_q_residual, right_inverse_residual, KernelCache};
use miura_core::{Algebra, CliffordField, GridSpec, Multivector};

fn sample(name: &str, g: &GridSpec) -> CliffordField {
    let a = Algebra::plain(2).unwrap();
    match name {
        "e0" => CliffordField::constant(g, &Multivector::one(a)),
        "x1e1" => CliffordField::vector_from_fn(g, a, |x| vec![x[0], 0.0]).unwrap(),
        "sin_e2" => CliffordField::vector_from_fn(g, a, |x| vec![0.0, (PI * x[0]).sin()]).unwrap(),
        _ => unreachable!(),
    }
}

#[test]
fn identities_refine() {
    for name in ["e0", "x1e1", "sin_e2"] {
        let mut rows = Vec::new();
        for n in [16, 32, 64] {
            let g = GridSpec::unit(2, n).unwrap();
            let c = KernelCache::build(&g).unwrap();
            let f = sample(name, &g);
            rows.push((
                right_inverse_residual(&f, &c).unwrap(),
                borel_pompeiu_residual(&f, &c).unwrap(),
                im_q_residual(&f, &c).unwrap(),
            ));
        }
        println!("{name}: {rows:?}");
        let (ri, bp, _) = rows[1];
        assert!(ri < 0.05 && bp < 0.05, "{name}: {ri} {bp}");
        for w in rows.windows(2) {
            assert!(w[0].0 / w[1].0 >= 1.5, "{name}: right inverse {:?}", w);
            assert!(w[0].1 / w[1].1 >= 1.5, "{name}: borel-pompeiu {:?}", w);
        }
        for (_, bp, iq) in &rows {
            assert!(iq < bp, "{name}: im Q {iq} vs {bp}");
        }
    }
}
