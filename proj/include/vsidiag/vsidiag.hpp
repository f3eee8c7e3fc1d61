#pragma once

#include "vsidiag/signal_model.hpp"
#include "vsidiag/stft.hpp"
#include "vsidiag/features.hpp"
#include "vsidiag/classifier.hpp"
#include "vsidiag/harness.hpp"
#include "vsidiag/io.hpp"
