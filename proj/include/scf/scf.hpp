#pragma once

// Convenience umbrella pulling in the whole library.

#include "scf/adam.hpp"
#include "scf/area.hpp"
#include "scf/audio.hpp"
#include "scf/backprop.hpp"
#include "scf/checkpoint.hpp"
#include "scf/classifier.hpp"
#include "scf/config.hpp"
#include "scf/convolution.hpp"
#include "scf/crossval.hpp"
#include "scf/dataset.hpp"
#include "scf/errors.hpp"
#include "scf/fft.hpp"
#include "scf/gradcheck.hpp"
#include "scf/grid.hpp"
#include "scf/io.hpp"
#include "scf/lateral.hpp"
#include "scf/mlp.hpp"
#include "scf/model.hpp"
#include "scf/params.hpp"
#include "scf/rng.hpp"
#include "scf/spectrogram.hpp"
#include "scf/synth.hpp"
#include "scf/train.hpp"
