//! The `k·20 → j → 1` sigmoid network, online backpropagation with
//! cross-validation early stopping, and the `weights.net` text format.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descriptor::DESCRIPTOR_LEN;
use crate::error::{Error, Result};

pub const WEIGHTS_MAGIC: &str = "SATZ-WEIGHTS";
pub const WEIGHTS_VERSION: &str = "v1";

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    context: usize,
    hidden: usize,
    /// Row-major `[input][hidden]`.
    w_ih: Vec<f64>,
    b_h: Vec<f64>,
    w_ho: Vec<f64>,
    b_o: f64,
}

/// Gradient of `½(target − output)²` with the same layout as [`Network`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub w_ih: Vec<f64>,
    pub b_h: Vec<f64>,
    pub w_ho: Vec<f64>,
    pub b_o: f64,
}

impl Gradient {
    fn zeros(inputs: usize, hidden: usize) -> Self {
        Gradient {
            w_ih: vec![0.0; inputs * hidden],
            b_h: vec![0.0; hidden],
            w_ho: vec![0.0; hidden],
            b_o: 0.0,
        }
    }

    /// All components in [`Network::parameters`] order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.w_ih.len() + 2 * self.b_h.len() + 1);
        v.extend_from_slice(&self.w_ih);
        v.extend_from_slice(&self.b_h);
        v.extend_from_slice(&self.w_ho);
        v.push(self.b_o);
        v
    }
}

fn check_shape(context: usize, hidden: usize) -> Result<()> {
    if context == 0 || !context.is_multiple_of(2) {
        return Err(Error::Argument(format!(
            "context size must be even and positive, got {context}"
        )));
    }
    if hidden == 0 {
        return Err(Error::Argument("hidden layer needs at least one unit".into()));
    }
    Ok(())
}

impl Network {
    /// Weights drawn uniformly from `[-init_range, init_range]`.
    pub fn new(context: usize, hidden: usize, seed: u64, init_range: f64) -> Result<Self> {
        check_shape(context, hidden)?;
        if !(init_range.is_finite() && init_range >= 0.0) {
            return Err(Error::Argument(format!("bad init range {init_range}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    if init_range == 0.0 {
                        0.0
                    } else {
                        rng.gen_range(-init_range..=init_range)
                    }
                })
                .collect()
        };
        let inputs = context * DESCRIPTOR_LEN;
        let w_ih = draw(inputs * hidden);
        let b_h = draw(hidden);
        let w_ho = draw(hidden);
        let b_o = draw(1)[0];
        Ok(Network {
            context,
            hidden,
            w_ih,
            b_h,
            w_ho,
            b_o,
        })
    }

    pub fn zeros(context: usize, hidden: usize) -> Result<Self> {
        Network::new(context, hidden, 0, 0.0)
    }

    pub fn from_parts(
        context: usize,
        hidden: usize,
        w_ih: Vec<f64>,
        b_h: Vec<f64>,
        w_ho: Vec<f64>,
        b_o: f64,
    ) -> Result<Self> {
        check_shape(context, hidden)?;
        let inputs = context * DESCRIPTOR_LEN;
        if w_ih.len() != inputs * hidden || b_h.len() != hidden || w_ho.len() != hidden {
            return Err(Error::Format(format!(
                "weight arrays do not match k={context} j={hidden}"
            )));
        }
        let net = Network {
            context,
            hidden,
            w_ih,
            b_h,
            w_ho,
            b_o,
        };
        if !net.is_finite() {
            return Err(Error::Format("non-finite weight".into()));
        }
        Ok(net)
    }

    pub fn context(&self) -> usize {
        self.context
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn input_len(&self) -> usize {
        self.context * DESCRIPTOR_LEN
    }

    fn is_finite(&self) -> bool {
        self.parameters().iter().all(|w| w.is_finite())
    }

    /// Flattened as input→hidden weights, hidden biases, hidden→output
    /// weights, output bias.
    pub fn parameters(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.w_ih.len() + 2 * self.hidden + 1);
        v.extend_from_slice(&self.w_ih);
        v.extend_from_slice(&self.b_h);
        v.extend_from_slice(&self.w_ho);
        v.push(self.b_o);
        v
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<()> {
        let n = self.w_ih.len();
        let j = self.hidden;
        if params.len() != n + 2 * j + 1 {
            return Err(Error::Argument(format!(
                "expected {} parameters, got {}",
                n + 2 * j + 1,
                params.len()
            )));
        }
        self.w_ih.copy_from_slice(&params[..n]);
        self.b_h.copy_from_slice(&params[n..n + j]);
        self.w_ho.copy_from_slice(&params[n + j..n + 2 * j]);
        self.b_o = params[n + 2 * j];
        Ok(())
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_len() {
            return Err(Error::Argument(format!(
                "input has {} values, network expects {}",
                input.len(),
                self.input_len()
            )));
        }
        Ok(())
    }

    /// Fills `hidden` with hidden activations and returns the output.
    fn activate(&self, input: &[f64], hidden: &mut [f64]) -> f64 {
        hidden.copy_from_slice(&self.b_h);
        for (x, row) in input.iter().zip(self.w_ih.chunks_exact(self.hidden)) {
            if *x == 0.0 {
                continue;
            }
            for (h, w) in hidden.iter_mut().zip(row) {
                *h += w * x;
            }
        }
        let mut z = self.b_o;
        for (h, w) in hidden.iter_mut().zip(&self.w_ho) {
            *h = sigmoid(*h);
            z += *h * w;
        }
        sigmoid(z)
    }

    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        self.check_input(input)?;
        let mut hidden = vec![0.0; self.hidden];
        Ok(self.activate(input, &mut hidden))
    }

    /// Writes the gradient into `grad`, returning the output.
    fn backprop(&self, input: &[f64], target: f64, hidden: &mut [f64], grad: &mut Gradient) -> f64 {
        let out = self.activate(input, hidden);
        // dE/dz_out for E = ½(t − o)²
        let delta_out = (out - target) * out * (1.0 - out);
        grad.b_o = delta_out;
        for (((g_ho, g_h), &w), &h) in grad
            .w_ho
            .iter_mut()
            .zip(&mut grad.b_h)
            .zip(&self.w_ho)
            .zip(hidden.iter())
        {
            *g_ho = delta_out * h;
            *g_h = delta_out * w * h * (1.0 - h);
        }
        for (x, row) in input.iter().zip(grad.w_ih.chunks_exact_mut(self.hidden)) {
            for (g, d) in row.iter_mut().zip(&grad.b_h) {
                *g = d * x;
            }
        }
        out
    }

    /// Analytic gradient of `½(target − output)²`.
    pub fn gradient(&self, input: &[f64], target: f64) -> Result<Gradient> {
        self.check_input(input)?;
        let mut hidden = vec![0.0; self.hidden];
        let mut grad = Gradient::zeros(self.input_len(), self.hidden);
        self.backprop(input, target, &mut hidden, &mut grad);
        Ok(grad)
    }

    fn step(&mut self, grad: &Gradient, eta: f64) {
        for (w, g) in self.w_ih.iter_mut().zip(&grad.w_ih) {
            *w -= eta * g;
        }
        for (w, g) in self.b_h.iter_mut().zip(&grad.b_h) {
            *w -= eta * g;
        }
        for (w, g) in self.w_ho.iter_mut().zip(&grad.w_ho) {
            *w -= eta * g;
        }
        self.b_o -= eta * grad.b_o;
    }

    /// Half the sum of squared errors over a set.
    pub fn error(&self, set: &[Example]) -> Result<f64> {
        let mut hidden = vec![0.0; self.hidden];
        let mut sum = 0.0;
        for ex in set {
            self.check_input(&ex.input)?;
            let out = self.activate(&ex.input, &mut hidden);
            let e = ex.target() - out;
            sum += e * e;
        }
        Ok(0.5 * sum)
    }

    /// Renders the `weights.net` text form.
    pub fn to_weights_string(&self) -> String {
        let mut s = format!(
            "{WEIGHTS_MAGIC} {WEIGHTS_VERSION} k={} j={}\n",
            self.context, self.hidden
        );
        let row = |s: &mut String, values: &[f64]| {
            let parts: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&parts.join(" "));
            s.push('\n');
        };
        for r in self.w_ih.chunks_exact(self.hidden) {
            row(&mut s, r);
        }
        row(&mut s, &self.b_h);
        row(&mut s, &self.w_ho);
        let _ = writeln!(s, "{:.16e}", self.b_o);
        s
    }

    pub fn parse_weights(file: &str, content: &str) -> Result<Self> {
        let mut lines = content.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(file, 1, "empty weights file"))?;
        let (context, hidden) = parse_header(header).map_err(|m| Error::parse(file, 1, m))?;
        check_shape(context, hidden).map_err(|e| Error::parse(file, 1, e.to_string()))?;
        let inputs = context * DESCRIPTOR_LEN;

        let mut next_row = |want: usize, what: &str| -> Result<Vec<f64>> {
            let (i, line) = lines
                .next()
                .ok_or_else(|| Error::parse(file, content.lines().count() + 1, format!("truncated: missing {what}")))?;
            let values = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(file, i + 1, format!("bad number: {e}")))?;
            if values.len() != want {
                return Err(Error::Format(format!(
                    "{file}:{}: {what} has {} values, header says {want}",
                    i + 1,
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse(file, i + 1, "non-finite weight"));
            }
            Ok(values)
        };

        let mut w_ih = Vec::with_capacity(inputs * hidden);
        for r in 0..inputs {
            w_ih.extend(next_row(hidden, &format!("input row {r}"))?);
        }
        let b_h = next_row(hidden, "hidden biases")?;
        let w_ho = next_row(hidden, "output weights")?;
        let b_o = next_row(1, "output bias")?[0];
        if let Some((i, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::Format(format!(
                "{file}:{}: unexpected trailing data {extra:?}",
                i + 1
            )));
        }
        Network::from_parts(context, hidden, w_ih, b_h, w_ho, b_o)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_weights_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Network::parse_weights(&path.display().to_string(), &content)
    }
}

fn parse_header(line: &str) -> std::result::Result<(usize, usize), String> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(WEIGHTS_MAGIC) {
        return Err(format!("expected {WEIGHTS_MAGIC} header"));
    }
    match parts.next() {
        Some(WEIGHTS_VERSION) => {}
        other => return Err(format!("unsupported version {other:?}")),
    }
    let mut field = |name: &str| -> std::result::Result<usize, String> {
        parts
            .next()
            .and_then(|p| p.strip_prefix(name))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format!("expected {name}<integer> in header"))
    };
    let k = field("k=")?;
    let j = field("j=")?;
    Ok((k, j))
}

/// One labeled network input.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub input: Vec<f64>,
    pub boundary: bool,
}

impl Example {
    pub fn new(input: Vec<f64>, boundary: bool) -> Self {
        Example { input, boundary }
    }

    pub fn target(&self) -> f64 {
        if self.boundary {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Learning rate.
    pub eta: f64,
    pub max_epochs: usize,
    /// Epochs without a new cross-error minimum before stopping.
    pub patience: usize,
    /// Never stop before this many epochs.
    pub min_epochs: usize,
    /// Seeds pattern shuffling.
    pub seed: u64,
    /// Half-width of the uniform weight initialization.
    pub init_range: f64,
    /// Reshuffle the training set every epoch.
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            eta: 0.1,
            max_epochs: 5000,
            patience: 50,
            min_epochs: 20,
            seed: 1,
            init_range: 0.5,
            shuffle: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::Argument(format!("eta must be positive, got {}", self.eta)));
        }
        if self.max_epochs == 0 || self.patience == 0 {
            return Err(Error::Argument("max_epochs and patience must be positive".into()));
        }
        if !(self.init_range.is_finite() && self.init_range > 0.0) {
            return Err(Error::Argument("init_range must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    /// Epochs actually run.
    pub epochs: usize,
    /// Epoch whose weights were kept (1-based).
    pub best_epoch: usize,
    /// Training-set error of the kept weights.
    pub training_error: f64,
    /// Lowest cross-validation error seen; the kept weights reproduce it.
    pub cross_error: f64,
    /// `(training, cross)` error after every epoch.
    pub error_curve: Vec<(f64, f64)>,
}

/// Online backpropagation on `training`, halting when the error on `cross`
/// stops improving. Returns the weights from the epoch with the lowest
/// cross error.
pub fn train(
    mut net: Network,
    training: &[Example],
    cross: &[Example],
    cfg: &TrainConfig,
) -> Result<(Network, TrainingReport)> {
    cfg.validate()?;
    if training.is_empty() || cross.is_empty() {
        return Err(Error::Argument(
            "training and cross-validation sets must be non-empty".into(),
        ));
    }
    for ex in training.iter().chain(cross) {
        net.check_input(&ex.input)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..training.len()).collect();
    let mut hidden = vec![0.0; net.hidden];
    let mut grad = Gradient::zeros(net.input_len(), net.hidden);

    let mut best: Option<(Network, usize, f64, f64)> = None;
    let mut since_best = 0;
    let mut curve = Vec::new();
    let mut epoch = 0;
    while epoch < cfg.max_epochs {
        epoch += 1;
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        for &i in &order {
            let ex = &training[i];
            net.backprop(&ex.input, ex.target(), &mut hidden, &mut grad);
            net.step(&grad, cfg.eta);
        }
        let train_err = net.error(training)?;
        let cross_err = net.error(cross)?;
        if !(train_err.is_finite() && cross_err.is_finite()) || !net.is_finite() {
            return Err(Error::Training {
                epoch,
                message: "error diverged to a non-finite value".into(),
            });
        }
        curve.push((train_err, cross_err));
        log::trace!("epoch {epoch}: training {train_err:.6} cross {cross_err:.6}");

        if best.as_ref().is_none_or(|b| cross_err < b.3) {
            best = Some((net.clone(), epoch, train_err, cross_err));
            since_best = 0;
        } else {
            since_best += 1;
        }
        if epoch >= cfg.min_epochs && since_best >= cfg.patience {
            break;
        }
    }

    let (net, best_epoch, training_error, cross_error) = best.expect("at least one epoch ran");
    log::debug!("stopped after {epoch} epochs, keeping epoch {best_epoch} (cross {cross_error:.6})");
    Ok((
        net,
        TrainingReport {
            epochs: epoch,
            best_epoch,
            training_error,
            cross_error,
            error_curve: curve,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_shapes() {
        let net = Network::new(6, 2, 1, 0.5).unwrap();
        assert_eq!(net.input_len(), 120);
        assert_eq!(net.parameters().len(), 120 * 2 + 2 + 2 + 1);
        assert!(net.parameters().iter().all(|w| w.abs() <= 0.5));
        assert_eq!(Network::new(4, 1, 9, 0.5).unwrap().input_len(), 80);
    }

    #[test]
    fn init_is_deterministic() {
        assert_eq!(Network::new(6, 2, 7, 0.5).unwrap(), Network::new(6, 2, 7, 0.5).unwrap());
        assert_ne!(Network::new(6, 2, 7, 0.5).unwrap(), Network::new(6, 2, 8, 0.5).unwrap());
    }

    #[test]
    fn init_rejects_bad_shapes() {
        assert!(matches!(Network::new(5, 2, 1, 0.5), Err(Error::Argument(_))));
        assert!(matches!(Network::new(0, 2, 1, 0.5), Err(Error::Argument(_))));
        assert!(matches!(Network::new(6, 0, 1, 0.5), Err(Error::Argument(_))));
    }

    #[test]
    fn zero_weights_give_one_half() {
        let net = Network::zeros(2, 3).unwrap();
        let input: Vec<f64> = (0..40).map(|i| (i % 3) as f64 / 2.0).collect();
        assert_eq!(net.forward(&input).unwrap(), 0.5);
    }

    #[test]
    fn saturated_output_unit() {
        // one hidden unit with bias 10, output weight 100: σ(100·σ(10)) ≈ 1
        let mut net = Network::zeros(2, 1).unwrap();
        let mut p = net.parameters();
        let n = p.len();
        p[n - 3] = 10.0; // hidden bias
        p[n - 2] = 100.0; // hidden→output
        net.set_parameters(&p).unwrap();
        let expected = sigmoid(100.0 * sigmoid(10.0));
        let out = net.forward(&[0.0; 40]).unwrap();
        assert_eq!(out, expected);
        assert!(out > 1.0 - 1e-12);
    }

    #[test]
    fn forward_rejects_wrong_length() {
        let net = Network::zeros(2, 1).unwrap();
        assert!(matches!(net.forward(&[0.0; 39]), Err(Error::Argument(_))));
        assert!(matches!(net.gradient(&[0.0; 41], 1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn zero_error_signal_zeroes_output_bias_gradient() {
        let net = Network::new(2, 2, 3, 0.5).unwrap();
        let input = vec![0.25; 40];
        let out = net.forward(&input).unwrap();
        let g = net.gradient(&input, out).unwrap();
        assert_eq!(g.b_o, 0.0);
        assert!(g.to_flat().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_input_zeroes_input_weight_gradient() {
        let net = Network::new(2, 2, 3, 0.5).unwrap();
        let g = net.gradient(&[0.0; 40], 1.0).unwrap();
        assert!(g.w_ih.iter().all(|&v| v == 0.0));
        assert!(g.b_h.iter().all(|&v| v != 0.0));
        assert!(g.b_o != 0.0);
    }

    // central differences on the loss, independent of the backprop code
    fn numeric_gradient(net: &Network, input: &[f64], target: f64, h: f64) -> Vec<f64> {
        let loss = |n: &Network| {
            let o = n.forward(input).unwrap();
            0.5 * (target - o) * (target - o)
        };
        let params = net.parameters();
        (0..params.len())
            .map(|i| {
                let mut plus = net.clone();
                let mut p = params.clone();
                p[i] += h;
                plus.set_parameters(&p).unwrap();
                let mut minus = net.clone();
                p[i] -= 2.0 * h;
                minus.set_parameters(&p).unwrap();
                (loss(&plus) - loss(&minus)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let k = [2, 4][rng.gen_range(0..2)];
            let j = rng.gen_range(1..=3);
            let mut net = Network::new(k, j, rng.gen(), 1.0).unwrap();
            let p: Vec<f64> = net.parameters().iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            net.set_parameters(&p).unwrap();
            let input: Vec<f64> = (0..net.input_len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let target = if rng.gen() { 1.0 } else { 0.0 };
            let analytic = net.gradient(&input, target).unwrap().to_flat();
            let numeric = numeric_gradient(&net, &input, target, 1e-5);
            for (a, n) in analytic.iter().zip(&numeric) {
                let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-6);
                assert!(rel < 1e-4, "analytic {a} numeric {n}");
            }
        }
    }

    #[test]
    fn weights_round_trip_exactly() {
        let net = Network::new(6, 2, 11, 0.5).unwrap();
        let text = net.to_weights_string();
        assert!(text.starts_with("SATZ-WEIGHTS v1 k=6 j=2\n"));
        assert_eq!(text.lines().count(), 1 + 120 + 3);
        let back = Network::parse_weights("w", &text).unwrap();
        assert_eq!(back, net);
        let bits = |n: &Network| n.parameters().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&net));
    }

    #[test]
    fn weights_file_errors() {
        let net = Network::new(2, 2, 11, 0.5).unwrap();
        let text = net.to_weights_string();
        let truncated: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            Network::parse_weights("w", &truncated),
            Err(Error::Parse { .. })
        ));

        let bad_number = text.replacen("e-", "x-", 1);
        assert!(matches!(
            Network::parse_weights("w", &bad_number),
            Err(Error::Parse { line: 2, .. })
        ));

        let wrong_width = text.replacen("k=2 j=2", "k=2 j=3", 1);
        assert!(matches!(
            Network::parse_weights("w", &wrong_width),
            Err(Error::Format(_))
        ));

        assert!(matches!(
            Network::parse_weights("w", "HELLO v1 k=2 j=2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Network::parse_weights("w", "SATZ-WEIGHTS v1 k=3 j=2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(Network::parse_weights("w", "").is_err());
        let extra = format!("{text}1.0\n");
        assert!(matches!(Network::parse_weights("w", &extra), Err(Error::Format(_))));
    }

    fn toy_set(n: usize, seed: u64) -> Vec<Example> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let mut input: Vec<f64> = (0..40).map(|_| rng.gen_range(0.0..0.3)).collect();
                let label = rng.gen_bool(0.5);
                input[20 + 17] = if label { 1.0 } else { 0.0 };
                Example::new(input, label)
            })
            .collect()
    }

    #[test]
    fn training_validates_inputs() {
        let net = Network::new(2, 1, 1, 0.5).unwrap();
        let set = toy_set(4, 1);
        let cfg = TrainConfig::default();
        assert!(matches!(train(net.clone(), &[], &set, &cfg), Err(Error::Argument(_))));
        assert!(matches!(train(net.clone(), &set, &[], &cfg), Err(Error::Argument(_))));
        let bad = vec![Example::new(vec![0.0; 3], true)];
        assert!(matches!(train(net.clone(), &bad, &set, &cfg), Err(Error::Argument(_))));
        let cfg = TrainConfig {
            eta: 0.0,
            ..TrainConfig::default()
        };
        assert!(matches!(train(net, &set, &set, &cfg), Err(Error::Argument(_))));
    }

    #[test]
    fn non_finite_error_is_reported() {
        let net = Network::new(2, 1, 1, 0.5).unwrap();
        let mut set = toy_set(10, 1);
        set[3].input[7] = f64::NAN;
        match train(net, &set, &set, &TrainConfig::default()) {
            Err(Error::Training { epoch, .. }) => assert_eq!(epoch, 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn early_stopping_keeps_best_cross_weights() {
        let net = Network::new(2, 2, 5, 0.5).unwrap();
        let training = toy_set(60, 2);
        let cross = toy_set(30, 3);
        let cfg = TrainConfig {
            max_epochs: 300,
            patience: 10,
            ..TrainConfig::default()
        };
        let (best, report) = train(net, &training, &cross, &cfg).unwrap();
        let min = report.error_curve.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        assert_eq!(report.cross_error, min);
        assert_eq!(best.error(&cross).unwrap(), report.cross_error);
        assert_eq!(best.error(&training).unwrap(), report.training_error);
        assert_eq!(report.error_curve.len(), report.epochs);
        assert_eq!(report.error_curve[report.best_epoch - 1].1, min);
    }

    #[test]
    fn degenerate_cross_set_tracks_training_error() {
        let net = Network::new(2, 1, 5, 0.5).unwrap();
        let set = toy_set(40, 4);
        let cfg = TrainConfig {
            max_epochs: 200,
            patience: 5,
            ..TrainConfig::default()
        };
        let (_, report) = train(net, &set, &set, &cfg).unwrap();
        for (t, c) in &report.error_curve {
            assert_eq!(t, c);
        }
        assert_eq!(report.training_error, report.cross_error);
    }

    #[test]
    fn shuffled_training_is_seeded() {
        let set = toy_set(40, 4);
        let cfg = TrainConfig {
            max_epochs: 50,
            shuffle: true,
            seed: 9,
            ..TrainConfig::default()
        };
        let a = train(Network::new(2, 1, 5, 0.5).unwrap(), &set, &set, &cfg).unwrap();
        let b = train(Network::new(2, 1, 5, 0.5).unwrap(), &set, &set, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
