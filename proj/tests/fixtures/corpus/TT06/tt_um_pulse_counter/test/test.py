import cocotb
from cocotb.clock import Clock
from cocotb.triggers import ClockCycles


@cocotb.test()
async def test_count(dut):
    cocotb.start_soon(Clock(dut.clk, 10, units="us").start())
    dut.rst_n.value = 0
    dut.ui_in.value = 0
    await ClockCycles(dut.clk, 2)
    dut.rst_n.value = 1
    for _ in range(3):
        dut.ui_in.value = 1
        await ClockCycles(dut.clk, 1)
        dut.ui_in.value = 0
        await ClockCycles(dut.clk, 1)
    assert dut.uo_out.value == 3
    dut.ui_in.value = 2
    await ClockCycles(dut.clk, 2)
    assert dut.uo_out.value == 0
