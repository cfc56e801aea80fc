use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use weilrep::arith::{int, rat};
use weilrep::igusa::{counts_from_zeta, QuadraticPolynomial};
use weilrep::series::{eisenstein_expansion, qseries_expansion, SeriesRequest};
use weilrep::spaces::dimension;
use weilrep::{DiscriminantGroup, Lattice};

fn group(g: Vec<Vec<i64>>) -> Arc<DiscriminantGroup> {
    Arc::new(DiscriminantGroup::new(&Lattice::new(g).unwrap()).unwrap())
}

fn igusa(c: &mut Criterion) {
    let f = QuadraticPolynomial::new(
        vec![vec![int(-4), int(0), int(0)], vec![int(0), int(-4), int(0)], vec![int(0), int(0), int(2)]],
        vec![int(0); 3],
        int(1),
    );
    c.bench_function("igusa p=2 rank 3", |b| b.iter(|| counts_from_zeta(black_box(&f), 2, 6).unwrap()));
}

fn series(c: &mut Criterion) {
    let a1 = group(vec![vec![-2]]);
    let d44 = group(vec![vec![-4, 0], vec![0, -4]]);
    c.bench_function("E_5/2 on (-2), prec 10", |b| b.iter(|| eisenstein_expansion(&a1, &rat(5, 2), &int(10)).unwrap()));
    c.bench_function("E_3 on diag(-4,-4), prec 4", |b| b.iter(|| eisenstein_expansion(&d44, &int(3), &int(4)).unwrap()));
    let beta = d44.index_of(&[rat(1, 4), int(0)]).unwrap();
    let req = SeriesRequest::new(d44.clone(), int(3), rat(1, 8), beta, int(3)).unwrap();
    c.bench_function("Q_3,1/8,(1/4,0) on diag(-4,-4), prec 3", |b| b.iter(|| qseries_expansion(&req).unwrap()));
    c.bench_function("dimension diag(-4,-4) k=3", |b| b.iter(|| dimension(&d44, &int(3)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = igusa, series
}
criterion_main!(benches);
