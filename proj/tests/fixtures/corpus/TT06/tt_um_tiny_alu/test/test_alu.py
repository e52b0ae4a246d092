import cocotb
from cocotb.triggers import Timer


@cocotb.test()
async def test_add(dut):
    dut.ui_in.value = 0x23
    dut.uio_in.value = 0
    await Timer(1, units="ns")
    assert dut.dut.y.value == 5
