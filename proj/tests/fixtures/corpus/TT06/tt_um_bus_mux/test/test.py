import cocotb


@cocotb.test()
async def test_swap(dut):
    dut.uio_in.value = 0x12
    dut.ui_in.value = 0x20
    assert True
