#pragma once

#include <string>

#include "modbench/ast.hpp"
#include "modbench/netlist.hpp"
#include "modbench/sema.hpp"

namespace modbench {

// Flattens `top` and everything it instantiates into a bit-level netlist.
// Port bits are named `port[index]` (plain `port` for scalars); registers of
// submodule instances are prefixed with the instance path (`u0.q[3]`).
// Asynchronous resets are folded into the next-state function, i.e. they
// behave as synchronous resets. Throws ElabError for constructs outside the
// supported subset, latches, multiple drivers and combinational loops.
Netlist elaborate(const ast::SourceUnit& unit, const std::string& top, const sema::ParamEnv& overrides = {});

// Name of bit `index` of a signal as used in netlists and traces.
std::string bit_name(const std::string& signal, const sema::SignalInfo& info, uint32_t position);

}  // namespace modbench
