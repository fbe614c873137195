"""
求解器库使用示例
演示如何不经过命令行直接调用求解器、分析模块和导出工具

    python example_usage.py
"""

import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'main.settings')
django.setup()

from analysis.harness import operator_gap_study, temporal_order  # noqa: E402
from scenarios.config import dump_config, parse_config  # noqa: E402
from scenarios.export import write_profiles_csv  # noqa: E402
from scenarios.presets import get_preset  # noqa: E402
from scenarios.reports import render_gap_report, render_monitor_report, render_report  # noqa: E402
from solver.time_stepper import run  # noqa: E402
from utils.exceptions import SolverException  # noqa: E402


# 1. 运行预设算例（降低分辨率以便快速演示）
def run_preset():
    scenario = get_preset('example1', N=32, dt=0.6)
    record = run(scenario, [0.0, 30.0, 60.0])
    print(render_monitor_report(record))
    write_profiles_csv(record, 'output/example1.csv')
    return record


# 2. 从YAML文本构造自定义场景
CUSTOM_SCENARIO = """
scenario:
  name: sandy_column
  Z: 30
  T: 30
  N: 24
  dt: 0.3
  delta: 0.2
  sink: -5.0e-4
  soil: example1_sand
  ic:
    type: chebyshev
    coefficients: [0.18, 0.04]
  bc_top:
    start: 0.22
    end: 0.2
  bc_bottom:
    start: 0.14
    end: 0.14
output:
  times: [0, 15, 30]
"""


def run_custom():
    config = parse_config(CUSTOM_SCENARIO)
    print(dump_config(config))
    try:
        record = run(config.scenario, config.snapshot_times)
    except SolverException as exc:
        # 运行中断时异常携带不完整的运行记录
        print(render_monitor_report(exc.record))
        raise
    return record


# 3. 时间自收敛研究
def converge():
    base = get_preset('example2', N=16)
    study = temporal_order(base, [2.4, 1.2, 0.6])
    print(render_report(study))


# 4. 谱方法算子与直接求积对比
def operator_check():
    table = operator_gap_study(0.15, Ns=(16, 32, 64))
    print(render_gap_report(table))


if __name__ == '__main__':
    run_preset()
    run_custom()
    converge()
    operator_check()
