#pragma once

#include "depthbench/losses/combined.hpp"
#include "depthbench/losses/distill.hpp"
#include "depthbench/losses/gradient.hpp"
#include "depthbench/losses/robust.hpp"
#include "depthbench/losses/silog.hpp"
#include "depthbench/losses/vnl.hpp"
