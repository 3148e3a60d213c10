//! Differentiate a small expression with the tape and compare against
//! central differences.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ulem::nn::{Graph, ParamStore};

fn main() -> ulem::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut store = ParamStore::<f64>::new();
    let x = store.add_uniform("x", 2, 3, 1.0, &mut rng);
    let w = store.add_uniform("w", 3, 4, 1.0, &mut rng);
    let targets = [1u32, 3];

    // loss = cross_entropy(tanh(x w), targets)
    let loss_of = |store: &ParamStore<f64>| -> ulem::Result<f64> {
        let mut g = Graph::new(store);
        let (xv, wv) = (g.param(x), g.param(w));
        let h = g.matmul(xv, wv)?;
        let h = g.tanh(h);
        let loss = g.cross_entropy(h, &targets, &[1.0, 1.0])?;
        Ok(g.value(loss).item())
    };

    let grads = {
        let mut g = Graph::new(&store);
        let (xv, wv) = (g.param(x), g.param(w));
        let h = g.matmul(xv, wv)?;
        let h = g.tanh(h);
        let loss = g.cross_entropy(h, &targets, &[1.0, 1.0])?;
        g.backward(loss)?
    };

    let eps = 1e-4;
    let mut worst: f64 = 0.0;
    for id in [x, w] {
        for i in 0..store.value(id).data().len() {
            let orig = store.value(id).data()[i];
            store.get_mut(id).value.data_mut()[i] = orig + eps;
            let plus = loss_of(&store)?;
            store.get_mut(id).value.data_mut()[i] = orig - eps;
            let minus = loss_of(&store)?;
            store.get_mut(id).value.data_mut()[i] = orig;
            let numeric = (plus - minus) / (2.0 * eps);
            worst = worst.max((grads.entry(id, i) - numeric).abs());
        }
    }
    println!("loss {:.6}", loss_of(&store)?);
    println!("largest analytic/numeric gap {worst:.2e}");
    Ok(())
}
