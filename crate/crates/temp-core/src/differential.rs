//! Differential TEMP layers and full-network forward evaluation.
//!
//! Every value travels as a pair of spike times (t+, t-) whose difference
//! encodes the value, and every synapse carries a pair of nonnegative axonal
//! delays. A neuron solves one TEMP crossing per rail: the plus rail collects
//! arrivals {t_j+ + w+, t_j- + w-}, the minus rail the cross pairing
//! {t_j+ + w-, t_j- + w+}, both against the layer threshold tau_m. The raw
//! pair then passes a differential ReLU that clamps negative encoded values
//! to zero.

use thiserror::Error;

use crate::temporal::{solve_indexed, NeuronParams, Polarity, Time, NEVER};

/// A (t+, t-) spike-time pair encoding the value `t+ - t-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialTime {
    pub t_plus: Time,
    pub t_minus: Time,
}

impl DifferentialTime {
    pub fn new(t_plus: Time, t_minus: Time) -> Self {
        Self { t_plus, t_minus }
    }

    /// Pair encoding zero at reference time `t`.
    pub fn symmetric(t: Time) -> Self {
        Self {
            t_plus: t,
            t_minus: t,
        }
    }

    /// Encoded value. Finite rails only; non-firing rails must be clamped
    /// to a deadline first.
    pub fn value(&self) -> f64 {
        self.t_plus - self.t_minus
    }

    pub fn rail(&self, polarity: Polarity) -> Time {
        match polarity {
            Polarity::Plus => self.t_plus,
            Polarity::Minus => self.t_minus,
        }
    }

    /// Replaces non-firing rails by `deadline` so downstream layers see a
    /// (very late) finite arrival. Returns the clamped pair and which rails
    /// were clamped; clamped rails carry no gradient.
    pub fn clamp_never(&self, deadline: Time) -> (Self, (bool, bool)) {
        let cp = !self.t_plus.is_finite();
        let cm = !self.t_minus.is_finite();
        (
            Self {
                t_plus: if cp { deadline } else { self.t_plus },
                t_minus: if cm { deadline } else { self.t_minus },
            },
            (cp, cm),
        )
    }
}

/// Differential ReLU: pass when `t+ >= t-` (nonnegative encoded value),
/// otherwise collapse to `(t-, t-)` so the value clamps to zero.
pub fn differential_relu(raw: DifferentialTime) -> DifferentialTime {
    if raw.t_plus >= raw.t_minus {
        raw
    } else {
        DifferentialTime::symmetric(raw.t_minus)
    }
}

/// Pair of nonnegative axonal delays; the effective weight is `w+ - w-`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DelayWeight {
    pub w_plus: f64,
    pub w_minus: f64,
}

impl DelayWeight {
    pub fn new(w_plus: f64, w_minus: f64) -> Self {
        Self { w_plus, w_minus }
    }

    pub fn effective(&self) -> f64 {
        self.w_plus - self.w_minus
    }

    pub fn rail(&self, polarity: Polarity) -> f64 {
        match polarity {
            Polarity::Plus => self.w_plus,
            Polarity::Minus => self.w_minus,
        }
    }

    pub fn rail_mut(&mut self, polarity: Polarity) -> &mut f64 {
        match polarity {
            Polarity::Plus => &mut self.w_plus,
            Polarity::Minus => &mut self.w_minus,
        }
    }
}

/// Per-layer normalization of encoded values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    None,
    BatchNorm,
}

/// Topology of one layer.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerSpec {
    Dense {
        fan_in: usize,
        fan_out: usize,
        /// Firing threshold tau_m (the gamma of the underlying TEMP solve).
        threshold: f64,
        time_out: Time,
        norm: Normalization,
    },
    Conv2d {
        /// Input grid (height, width, channels), flattened row-major with
        /// channel fastest.
        in_shape: (usize, usize, usize),
        /// Kernel (height, width).
        kernel: (usize, usize),
        out_channels: usize,
        stride: usize,
        threshold: f64,
        time_out: Time,
        norm: Normalization,
    },
    /// Max pooling on encoded values: keeps the pair with the largest
    /// `t+ - t-` in each window, first index winning ties. Stride equals the
    /// window.
    MaxPool {
        in_shape: (usize, usize, usize),
        window: (usize, usize),
    },
}

impl LayerSpec {
    pub fn dense(fan_in: usize, fan_out: usize, threshold: f64, time_out: Time) -> Self {
        LayerSpec::Dense {
            fan_in,
            fan_out,
            threshold,
            time_out,
            norm: Normalization::None,
        }
    }

    pub fn input_len(&self) -> usize {
        match self {
            LayerSpec::Dense { fan_in, .. } => *fan_in,
            LayerSpec::Conv2d { in_shape, .. } | LayerSpec::MaxPool { in_shape, .. } => {
                in_shape.0 * in_shape.1 * in_shape.2
            }
        }
    }

    pub fn out_shape(&self) -> (usize, usize, usize) {
        match self {
            LayerSpec::Dense { fan_out, .. } => (1, 1, *fan_out),
            LayerSpec::Conv2d {
                in_shape,
                kernel,
                out_channels,
                stride,
                ..
            } => {
                let oh = (in_shape.0 - kernel.0) / stride + 1;
                let ow = (in_shape.1 - kernel.1) / stride + 1;
                (oh, ow, *out_channels)
            }
            LayerSpec::MaxPool { in_shape, window } => (
                in_shape.0 / window.0,
                in_shape.1 / window.1,
                in_shape.2,
            ),
        }
    }

    pub fn output_len(&self) -> usize {
        let (h, w, c) = self.out_shape();
        h * w * c
    }

    /// Number of delay-pair weights this layer owns.
    pub fn weight_count(&self) -> usize {
        match self {
            LayerSpec::Dense {
                fan_in, fan_out, ..
            } => fan_in * fan_out,
            LayerSpec::Conv2d {
                in_shape,
                kernel,
                out_channels,
                ..
            } => out_channels * kernel.0 * kernel.1 * in_shape.2,
            LayerSpec::MaxPool { .. } => 0,
        }
    }

    pub fn threshold(&self) -> f64 {
        match self {
            LayerSpec::Dense { threshold, .. } | LayerSpec::Conv2d { threshold, .. } => *threshold,
            LayerSpec::MaxPool { .. } => 0.0,
        }
    }

    pub fn time_out(&self) -> Time {
        match self {
            LayerSpec::Dense { time_out, .. } | LayerSpec::Conv2d { time_out, .. } => *time_out,
            LayerSpec::MaxPool { .. } => 0.0,
        }
    }

    pub fn norm(&self) -> Normalization {
        match self {
            LayerSpec::Dense { norm, .. } | LayerSpec::Conv2d { norm, .. } => *norm,
            LayerSpec::MaxPool { .. } => Normalization::None,
        }
    }

    pub fn is_temp(&self) -> bool {
        !matches!(self, LayerSpec::MaxPool { .. })
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        match self {
            LayerSpec::Dense {
                fan_in,
                fan_out,
                threshold,
                time_out,
                ..
            } => {
                if *fan_in == 0 || *fan_out == 0 {
                    return Err(NetworkError::BadSpec("dense layer with zero fan"));
                }
                if !(*threshold > 0.0) || !(*time_out > 0.0) {
                    return Err(NetworkError::BadSpec(
                        "threshold and time_out must be positive",
                    ));
                }
            }
            LayerSpec::Conv2d {
                in_shape,
                kernel,
                out_channels,
                stride,
                threshold,
                time_out,
                ..
            } => {
                if *out_channels == 0 || *stride == 0 {
                    return Err(NetworkError::BadSpec("conv layer with zero size"));
                }
                if kernel.0 > in_shape.0
                    || kernel.1 > in_shape.1
                    || (in_shape.0 - kernel.0) % stride != 0
                    || (in_shape.1 - kernel.1) % stride != 0
                {
                    return Err(NetworkError::BadSpec(
                        "conv kernel must cover the input exactly at the declared stride",
                    ));
                }
                if !(*threshold > 0.0) || !(*time_out > 0.0) {
                    return Err(NetworkError::BadSpec(
                        "threshold and time_out must be positive",
                    ));
                }
            }
            LayerSpec::MaxPool { in_shape, window } => {
                if window.0 == 0
                    || window.1 == 0
                    || in_shape.0 % window.0 != 0
                    || in_shape.1 % window.1 != 0
                {
                    return Err(NetworkError::BadSpec(
                        "pool window must tile the input exactly",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Ordered feed-forward stack plus the input encoding offset.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub layers: Vec<LayerSpec>,
    /// Encoding offset `a` of the input mapping (kept with the network so a
    /// trained model is self-describing).
    pub encoding_offset: f64,
    pub encoding_scale: f64,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.layers.is_empty() {
            return Err(NetworkError::BadSpec("network has no layers"));
        }
        for layer in &self.layers {
            layer.validate()?;
        }
        for pair in self.layers.windows(2) {
            if pair[0].output_len() != pair[1].input_len() {
                return Err(NetworkError::BadSpec("adjacent layer shapes do not compose"));
            }
        }
        Ok(())
    }

    pub fn input_len(&self) -> usize {
        self.layers[0].input_len()
    }

    pub fn output_len(&self) -> usize {
        self.layers.last().expect("nonempty").output_len()
    }
}

/// Learned batch-normalization state for one layer (acts on encoded values,
/// correction applied to the plus rail only).
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNorm {
    pub scale: Vec<f64>,
    pub shift: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
}

impl BatchNorm {
    pub fn identity(features: usize) -> Self {
        Self {
            scale: vec![1.0; features],
            shift: vec![0.0; features],
            running_mean: vec![0.0; features],
            running_var: vec![1.0; features],
        }
    }
}

/// A network: spec plus per-layer delay weights (row-major `[out][in]` for
/// dense, `[oc][kh][kw][ic]` for conv) and optional batch-norm state.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub spec: NetworkSpec,
    pub weights: Vec<Vec<DelayWeight>>,
    pub norms: Vec<Option<BatchNorm>>,
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid layer/network spec: {0}")]
    BadSpec(&'static str),
    #[error("shape mismatch: expected {expected} inputs, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("negative delay weight")]
    NegativeWeight,
    #[error("non-finite input time")]
    NonFiniteInput,
    #[error(transparent)]
    Temporal(#[from] crate::temporal::TemporalError),
}

/// Provenance of one causal arrival: which input unit fed it, on which rail,
/// and through which weight slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalArrival {
    pub input: u32,
    pub weight: u32,
    pub src_rail: Polarity,
}

impl CausalArrival {
    /// The delay rail that carried this arrival, given the output rail the
    /// arrival contributed to. Plus-rail outputs pair like rails with like
    /// weights; minus-rail outputs use the cross pairing.
    pub fn weight_rail(&self, out_rail: Polarity) -> Polarity {
        match out_rail {
            Polarity::Plus => self.src_rail,
            Polarity::Minus => self.src_rail.flip(),
        }
    }
}

/// Raw rail times and causal sets of one solved neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronSolve {
    pub raw: DifferentialTime,
    pub plus_causal: Vec<CausalArrival>,
    pub minus_causal: Vec<CausalArrival>,
}

impl NeuronSolve {
    pub fn causal(&self, rail: Polarity) -> &[CausalArrival] {
        match rail {
            Polarity::Plus => &self.plus_causal,
            Polarity::Minus => &self.minus_causal,
        }
    }
}

/// Solves one differential TEMP neuron.
///
/// `weight_base(j)` maps the local input index to the layer's weight slot;
/// dense layers pass the row offset, conv layers the kernel slot for the
/// receptive-field position. Inputs must be finite (clamp non-firing rails
/// first).
fn solve_neuron(
    inputs: &[DifferentialTime],
    input_ids: Option<&[u32]>,
    weights: &[DelayWeight],
    weight_ids: Option<&[u32]>,
    params: &NeuronParams,
    scratch: &mut Vec<(Time, u32)>,
) -> Result<NeuronSolve, NetworkError> {
    debug_assert_eq!(inputs.len(), weights.len());
    let n = inputs.len();
    let mut rail_solve = |out_rail: Polarity| -> Result<(Time, Vec<CausalArrival>), NetworkError> {
        scratch.clear();
        scratch.reserve(2 * n);
        for j in 0..n {
            let w = &weights[j];
            let inp = &inputs[j];
            // Arrival slot 2j: source plus rail; slot 2j+1: source minus rail.
            let (wa, wb) = match out_rail {
                Polarity::Plus => (w.w_plus, w.w_minus),
                Polarity::Minus => (w.w_minus, w.w_plus),
            };
            scratch.push((inp.t_plus + wa, 2 * j as u32));
            scratch.push((inp.t_minus + wb, 2 * j as u32 + 1));
        }
        let (t_z, causal_len) = solve_indexed(scratch, params)?;
        let mut causal = Vec::with_capacity(causal_len);
        for &(_, slot) in scratch.iter().take(causal_len) {
            let local = (slot / 2) as usize;
            let src_rail = if slot % 2 == 0 {
                Polarity::Plus
            } else {
                Polarity::Minus
            };
            causal.push(CausalArrival {
                input: input_ids.map_or(local as u32, |ids| ids[local]),
                weight: weight_ids.map_or(local as u32, |ids| ids[local]),
                src_rail,
            });
        }
        Ok((t_z, causal))
    };
    let (t_plus, plus_causal) = rail_solve(Polarity::Plus)?;
    let (t_minus, minus_causal) = rail_solve(Polarity::Minus)?;
    Ok(NeuronSolve {
        raw: DifferentialTime::new(t_plus, t_minus),
        plus_causal,
        minus_causal,
    })
}

/// Spec-level single-neuron entry point: both rails solved at threshold
/// `tau_m`, with causal sets. Either rail may come back [`NEVER`].
pub fn neuron_forward(
    inputs: &[DifferentialTime],
    weights: &[DelayWeight],
    tau_m: f64,
    time_out: Time,
) -> Result<NeuronSolve, NetworkError> {
    if inputs.len() != weights.len() {
        return Err(NetworkError::ShapeMismatch {
            expected: weights.len(),
            got: inputs.len(),
        });
    }
    for inp in inputs {
        if !inp.t_plus.is_finite() || !inp.t_minus.is_finite() {
            return Err(NetworkError::NonFiniteInput);
        }
    }
    for w in weights {
        if w.w_plus < 0.0 || w.w_minus < 0.0 {
            return Err(NetworkError::NegativeWeight);
        }
    }
    let params = NeuronParams::non_leaky(tau_m, time_out);
    params.validate().map_err(NetworkError::Temporal)?;
    let mut scratch = Vec::new();
    solve_neuron(inputs, None, weights, None, &params, &mut scratch)
}

/// Output of one layer in a recorded forward pass.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerOutput {
    Temp {
        solves: Vec<NeuronSolve>,
        /// Rail pairs after the differential ReLU; non-firing rails keep
        /// [`NEVER`].
        post: Vec<DifferentialTime>,
    },
    Pool {
        /// Input index selected per output unit.
        selected: Vec<u32>,
        post: Vec<DifferentialTime>,
    },
}

impl LayerOutput {
    pub fn post(&self) -> &[DifferentialTime] {
        match self {
            LayerOutput::Temp { post, .. } | LayerOutput::Pool { post, .. } => post,
        }
    }
}

/// Full record of one forward pass: per-layer finite inputs (with clamp
/// flags), per-layer outputs, and classifier logits.
#[derive(Debug, Clone)]
pub struct ForwardRecord {
    /// Finite inputs fed to each layer (non-firing rails clamped to the
    /// producing layer's deadline).
    pub layer_inputs: Vec<Vec<DifferentialTime>>,
    /// Which rails were clamped from NEVER, per layer input.
    pub layer_clamped: Vec<Vec<(bool, bool)>>,
    pub layers: Vec<LayerOutput>,
    pub logits: Vec<f64>,
}

impl ForwardRecord {
    /// Winning class: argmax of the logits, lowest index on ties.
    pub fn winner(&self) -> usize {
        argmax(&self.logits)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

impl Network {
    pub fn new(spec: NetworkSpec, weights: Vec<Vec<DelayWeight>>) -> Result<Self, NetworkError> {
        spec.validate()?;
        if weights.len() != spec.layers.len() {
            return Err(NetworkError::BadSpec("one weight block per layer required"));
        }
        for (layer, block) in spec.layers.iter().zip(&weights) {
            if block.len() != layer.weight_count() {
                return Err(NetworkError::ShapeMismatch {
                    expected: layer.weight_count(),
                    got: block.len(),
                });
            }
            if block.iter().any(|w| w.w_plus < 0.0 || w.w_minus < 0.0) {
                return Err(NetworkError::NegativeWeight);
            }
        }
        let norms = spec
            .layers
            .iter()
            .map(|l| match l.norm() {
                Normalization::BatchNorm => Some(BatchNorm::identity(l.output_len())),
                Normalization::None => None,
            })
            .collect();
        Ok(Self {
            spec,
            weights,
            norms,
        })
    }

    /// Evaluates one layer on finite inputs, without normalization.
    pub fn layer_forward(
        &self,
        layer_idx: usize,
        inputs: &[DifferentialTime],
        scratch: &mut Vec<(Time, u32)>,
    ) -> Result<LayerOutput, NetworkError> {
        let layer = &self.spec.layers[layer_idx];
        if inputs.len() != layer.input_len() {
            return Err(NetworkError::ShapeMismatch {
                expected: layer.input_len(),
                got: inputs.len(),
            });
        }
        match layer {
            LayerSpec::Dense {
                fan_in,
                fan_out,
                threshold,
                time_out,
                ..
            } => {
                let params = NeuronParams::non_leaky(*threshold, *time_out);
                let mut solves = Vec::with_capacity(*fan_out);
                let weights = &self.weights[layer_idx];
                for out in 0..*fan_out {
                    let row = &weights[out * fan_in..(out + 1) * fan_in];
                    let base = (out * fan_in) as u32;
                    let weight_ids: Vec<u32> = (0..*fan_in as u32).map(|j| base + j).collect();
                    let solve = solve_neuron(
                        inputs,
                        None,
                        row,
                        Some(&weight_ids),
                        &params,
                        scratch,
                    )?;
                    solves.push(solve);
                }
                let post = solves
                    .iter()
                    .map(|s| differential_relu(s.raw))
                    .collect();
                Ok(LayerOutput::Temp { solves, post })
            }
            LayerSpec::Conv2d {
                in_shape,
                kernel,
                out_channels,
                stride,
                threshold,
                time_out,
                ..
            } => {
                let params = NeuronParams::non_leaky(*threshold, *time_out);
                let (ih, iw, ic) = *in_shape;
                let (kh, kw) = *kernel;
                let (oh, ow, oc) = layer.out_shape();
                debug_assert_eq!(oc, *out_channels);
                let patch = kh * kw * ic;
                let weights = &self.weights[layer_idx];
                let mut solves = Vec::with_capacity(oh * ow * oc);
                let mut patch_inputs = Vec::with_capacity(patch);
                let mut input_ids = Vec::with_capacity(patch);
                for oy in 0..oh {
                    for ox in 0..ow {
                        patch_inputs.clear();
                        input_ids.clear();
                        for ky in 0..kh {
                            for kx in 0..kw {
                                let (y, x) = (oy * stride + ky, ox * stride + kx);
                                for c in 0..ic {
                                    let idx = (y * iw + x) * ic + c;
                                    patch_inputs.push(inputs[idx]);
                                    input_ids.push(idx as u32);
                                }
                            }
                        }
                        for ch in 0..oc {
                            let kbase = ch * patch;
                            let row = &weights[kbase..kbase + patch];
                            let weight_ids: Vec<u32> =
                                (0..patch as u32).map(|j| (kbase as u32) + j).collect();
                            let solve = solve_neuron(
                                &patch_inputs,
                                Some(&input_ids),
                                row,
                                Some(&weight_ids),
                                &params,
                                scratch,
                            )?;
                            solves.push(solve);
                        }
                    }
                }
                let post = solves
                    .iter()
                    .map(|s| differential_relu(s.raw))
                    .collect();
                Ok(LayerOutput::Temp { solves, post })
            }
            LayerSpec::MaxPool { in_shape, window } => {
                let (ih, iw, ic) = *in_shape;
                let (ph, pw) = *window;
                let (oh, ow, _) = layer.out_shape();
                let mut selected = Vec::with_capacity(oh * ow * ic);
                let mut post = Vec::with_capacity(oh * ow * ic);
                for oy in 0..oh {
                    for ox in 0..ow {
                        for c in 0..ic {
                            let mut best_idx = 0u32;
                            let mut best_val = f64::NEG_INFINITY;
                            for ky in 0..ph {
                                for kx in 0..pw {
                                    let (y, x) = (oy * ph + ky, ox * pw + kx);
                                    let idx = (y * iw + x) * ic + c;
                                    let v = inputs[idx].value();
                                    if v > best_val {
                                        best_val = v;
                                        best_idx = idx as u32;
                                    }
                                }
                            }
                            selected.push(best_idx);
                            post.push(inputs[best_idx as usize]);
                        }
                    }
                }
                let _ = ih;
                Ok(LayerOutput::Pool { selected, post })
            }
        }
    }

    /// Applies this layer's batch-norm affine correction to one sample using
    /// running statistics (inference path). Training uses batch statistics in
    /// the training loop instead.
    fn apply_norm_running(&self, layer_idx: usize, pairs: &mut [DifferentialTime]) {
        if let Some(bn) = &self.norms[layer_idx] {
            for (i, p) in pairs.iter_mut().enumerate() {
                if p.t_plus.is_finite() && p.t_minus.is_finite() {
                    let v = p.value();
                    let sigma = bn.running_var[i].sqrt().max(crate::grad::STD_FLOOR);
                    let vhat = (v - bn.running_mean[i]) / sigma * bn.scale[i] + bn.shift[i];
                    p.t_plus = p.t_minus + vhat;
                }
            }
        }
    }

    /// Full forward evaluation of one sample, recording raw rails, causal
    /// sets, ReLU branches, and clamps for the gradient tape. Classifier
    /// logits are the post-ReLU encoded values with non-firing rails read as
    /// the final layer's deadline; an all-silent output layer therefore
    /// yields all-equal logits.
    pub fn forward(&self, input: &[DifferentialTime]) -> Result<ForwardRecord, NetworkError> {
        self.forward_with_norm(input, NormMode::Running)
    }

    /// Forward pass selecting how batch-norm layers are applied.
    pub fn forward_with_norm(
        &self,
        input: &[DifferentialTime],
        norm: NormMode,
    ) -> Result<ForwardRecord, NetworkError> {
        for p in input {
            if !p.t_plus.is_finite() || !p.t_minus.is_finite() {
                return Err(NetworkError::NonFiniteInput);
            }
        }
        let mut scratch = Vec::new();
        let mut layer_inputs = Vec::with_capacity(self.spec.layers.len());
        let mut layer_clamped = Vec::with_capacity(self.spec.layers.len());
        let mut layers = Vec::with_capacity(self.spec.layers.len());
        let mut current: Vec<DifferentialTime> = input.to_vec();
        let mut current_flags: Vec<(bool, bool)> = vec![(false, false); current.len()];
        let mut prev_deadline = 0.0f64;
        for (idx, layer) in self.spec.layers.iter().enumerate() {
            layer_inputs.push(current.clone());
            layer_clamped.push(current_flags.clone());
            let out = self.layer_forward(idx, &current, &mut scratch)?;
            let deadline = if layer.is_temp() {
                layer.time_out()
            } else {
                prev_deadline
            };
            let mut post = out.post().to_vec();
            if layer.is_temp() && norm == NormMode::Running {
                self.apply_norm_running(idx, &mut post);
            }
            let mut flags = Vec::with_capacity(post.len());
            let mut finite = Vec::with_capacity(post.len());
            for p in &post {
                let (clamped, f) = p.clamp_never(deadline);
                finite.push(clamped);
                flags.push(f);
            }
            layers.push(out);
            current = finite;
            current_flags = flags;
            prev_deadline = deadline;
        }
        let logits = current.iter().map(|p| p.value()).collect();
        Ok(ForwardRecord {
            layer_inputs,
            layer_clamped,
            layers,
            logits,
        })
    }
}

/// How normalization layers are applied during a forward pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    /// Use running statistics (single-sample inference).
    Running,
    /// Skip the affine correction entirely (the training loop applies batch
    /// statistics itself).
    Skip,
}
