use margulis::affdyn::{self, AffineSetting};
use margulis::hp::Hp;
use margulis::linalg::{self, Mat};
use margulis::matgroups::{self, GroupRealization, SeededRng};
use margulis::rootsys;
use rand::SeedableRng;

const GROUPS: [&str; 4] = ["so(2,1)", "so(3,2)", "so(4,3)", "sl(3)"];

fn minus_w0(mg: &dyn GroupRealization, x: &[Hp]) -> Vec<Hp> {
    let w0 = rootsys::longest_element(mg.rs());
    w0.matrix.iter().map(|row| row.iter().zip(x).fold(Hp::ZERO, |acc, (c, v)| acc - Hp::from_q(c) * *v)).collect()
}

fn max_diff(a: &[Hp], b: &[Hp]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).abs().to_f64()).fold(0.0, f64::max)
}

#[test]
fn projections_of_inverse() {
    for name in GROUPS {
        let mg = matgroups::build(name).unwrap();
        let mut rng = SeededRng::seed_from_u64(23);
        for _ in 0..20 {
            let g = matgroups::random_element(mg.as_ref(), &mut rng, 1.0);
            let gi = g.inverse();
            let ct = matgroups::cartan_projection(mg.as_ref(), &g).unwrap().value;
            let cti = matgroups::cartan_projection(mg.as_ref(), &gi).unwrap().value;
            assert!(max_diff(&cti, &minus_w0(mg.as_ref(), &ct)) <= 1e-6, "{name}: Ct(g^-1) != -w0 Ct(g)");
            let jd = matgroups::jordan_projection(mg.as_ref(), &g).unwrap().value;
            let jdi = matgroups::jordan_projection(mg.as_ref(), &gi).unwrap().value;
            assert!(max_diff(&jdi, &minus_w0(mg.as_ref(), &jd)) <= 1e-6, "{name}: Jd(g^-1) != -w0 Jd(g)");
        }
    }
}

#[test]
fn canonizer_is_a_group_element() {
    for name in ["so(2,1)", "so(4,3)", "sl(3)"] {
        let st = AffineSetting::from_name(name).unwrap();
        let mg = st.mg();
        let mut rng = SeededRng::seed_from_u64(29);
        for _ in 0..10 {
            let g = affdyn::random_type_x0(&st, &mut rng, 1.0, 0.7, 1.0);
            let sp = st.split(&g).unwrap();
            let phi = mg.canonizer(&sp.vge, &sp.vle).unwrap();
            assert!(mg.membership_residual(&phi.m) <= 1e-8, "{name}: canonizer leaves the group");
            let img_ge = phi.m.mul(&sp.vge);
            let img_le = phi.m.mul(&sp.vle);
            assert!(linalg::subspace_distance(&img_ge, &st.refs.vge).to_f64() <= 1e-8, "{name}: phi(V>=) != V>=_0");
            assert!(linalg::subspace_distance(&img_le, &st.refs.vle).to_f64() <= 1e-8, "{name}: phi(V<=) != V<=_0");
        }
    }
}

#[test]
fn weight_blocks_are_orthonormal_and_k_preserves_b() {
    for name in GROUPS {
        let mg = matgroups::build(name).unwrap();
        let blocks = mg.weight_table();
        let all = blocks.iter().fold(Mat::zeros(mg.dim(), 0), |acc, b| acc.hstack(&b.basis));
        assert_eq!(all.cols, mg.dim(), "{name}: blocks do not span V");
        let gram = all.transpose().mul(&all);
        assert!(gram.dist(&Mat::identity(mg.dim())) <= 1e-10, "{name}: weight blocks are not B-orthonormal");
        let mut rng = SeededRng::seed_from_u64(31);
        for _ in 0..10 {
            let k = mg.random_k(&mut rng);
            assert!(k.m.transpose().mul(&k.m).dist(&Mat::identity(mg.dim())) <= 1e-10, "{name}: K does not preserve B");
            assert!(mg.membership_residual(&k.m) <= 1e-10, "{name}: K leaves the group");
        }
    }
}

#[test]
fn cartan_projection_is_conjugation_invariant_under_k() {
    for name in GROUPS {
        let mg = matgroups::build(name).unwrap();
        let mut rng = SeededRng::seed_from_u64(37);
        for _ in 0..10 {
            let g = matgroups::random_element(mg.as_ref(), &mut rng, 1.0);
            let k1 = mg.random_k(&mut rng);
            let k2 = mg.random_k(&mut rng);
            let a = matgroups::cartan_projection(mg.as_ref(), &g).unwrap().value;
            let b = matgroups::cartan_projection(mg.as_ref(), &k1.mul(&g).mul(&k2)).unwrap().value;
            assert!(max_diff(&a, &b) <= 1e-6, "{name}: Ct(k1 g k2) != Ct(g)");
        }
    }
}
