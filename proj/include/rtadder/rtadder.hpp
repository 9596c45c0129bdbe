#pragma once

#include "rtadder/gate_model.hpp"
#include "rtadder/netlist.hpp"
#include "rtadder/adder_gen.hpp"
#include "rtadder/sim_engine.hpp"
#include "rtadder/vcd.hpp"
#include "rtadder/verify.hpp"
#include "rtadder/timing_model.hpp"
