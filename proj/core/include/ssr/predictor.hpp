#pragma once

#include <cstdint>
#include <vector>

#include "ssr/image.hpp"

namespace ssr {

struct LayerSpec {
  enum class Kind { kConvolution, kPointwiseNonlinearity, kDownsample, kLinearOutput };
  Kind kind = Kind::kConvolution;
  std::size_t out_channels = 0;  // convolution / linear-output only
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;      // odd sizes only
  unsigned stride = 1;           // 1 or 2
  bool relu = false;
};

/// Layered convolutional network with double-precision parameters, zero-padded
/// "same" convolutions, and exact parameter / input gradients via backprop.
/// Deterministic given the construction seed.
class PredictorNetwork {
 public:
  PredictorNetwork() = default;
  PredictorNetwork(std::vector<LayerSpec> layers, std::size_t input_channels,
                   std::uint64_t seed);

  Image forward(const Image& x) const;

  /// Intermediate activations (inputs of every layer plus the final output),
  /// needed by backward.
  struct Trace {
    std::vector<Image> acts;  // acts[0] = input, acts.back() = output
  };
  Image forward_trace(const Image& x, Trace* trace) const;

  /// Backpropagate an arbitrary cotangent on the output. Either gradient sink
  /// may be null.
  void backward(const Trace& trace, const Image& out_cotangent,
                std::vector<double>* param_grad, Image* input_grad) const;

  std::size_t param_count() const { return n_params_; }
  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& flat);
  void add_scaled(const std::vector<double>& direction, double scale);

  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::size_t input_channels() const { return input_channels_; }
  std::size_t output_channels() const;
  std::size_t total_stride() const;

 private:
  struct LayerParams {
    std::vector<double> weights;  // [oc][ic][kh][kw]
    std::vector<double> bias;     // [oc]
    std::size_t in_channels = 0;
  };

  std::vector<LayerSpec> layers_;
  std::vector<LayerParams> params_;
  std::size_t input_channels_ = 1;
  std::size_t n_params_ = 0;
};

/// The feature-space regressor: {32, 64, 64, 64, 219} maps, 9/9/9/3/1
/// kernels, ReLU hidden activations, stand-alone 2x downsampling stages after
/// the second and third convolutions, linear 219-channel output. Total
/// spatial reduction 4x.
PredictorNetwork build_phi_default(std::uint64_t seed = 0,
                                   std::size_t feature_channels = 219);

/// The pixel-space baseline: {64, 64, 64, 32} maps with 7/3/3/5 kernels and
/// ReLU at each hidden layer, then a linear 1x1 output back to one channel at
/// the input resolution.
PredictorNetwork build_baseline_default(std::uint64_t seed = 0);

}  // namespace ssr
