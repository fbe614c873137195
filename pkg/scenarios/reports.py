"""
文本报告与表格行
"""

import math

from analysis.harness import ConvergenceStudy, GapTable
from base.utils import NumberUtils
from solver.time_stepper import RunRecord, monitor_summary

STUDY_HEADER = ('level', 'max_error', 'l2w_error', 'order_max', 'order_l2w')
GAP_HEADER = ('pair', 'N', 'gap', 'monotone')


def _fmt(value: float) -> str:
    return 'nan' if math.isnan(value) else f'{value:.6e}'


def study_rows(study: ConvergenceStudy):
    """每个层级一行；观测阶写在较细的层级上，第一行为空"""
    rows = []
    for position, error in enumerate(study.errors):
        order_max = study.observed_orders[position - 1] if position else ''
        order_l2 = study.observed_orders_l2[position - 1] if position else ''
        rows.append((
            NumberUtils.format_float(error.level) if study.axis == 'time' else int(error.level),
            NumberUtils.format_float(error.max_error),
            NumberUtils.format_float(error.l2_error),
            order_max if order_max == '' else NumberUtils.format_float(order_max),
            order_l2 if order_l2 == '' else NumberUtils.format_float(order_l2),
        ))
    return rows


def gap_rows(table: GapTable):
    return [
        (row.pair, row.N, NumberUtils.format_float(row.gap), table.monotone(row.pair))
        for row in table.rows
    ]


def render_report(study: ConvergenceStudy) -> str:
    """一页纸的收敛性研究报告"""
    scenario = study.base_scenario
    axis_name = '时间' if study.axis == 'time' else '空间'
    level_name = 'dt' if study.axis == 'time' else 'N'
    if study.axis == 'time':
        reference = f'Richardson外推 2u(dt={study.reference_level}) - u(dt={2 * study.reference_level})'
        fixed = f'N = {scenario.N}'
    else:
        reference = f'N = {study.reference_level} 的解'
        fixed = f'dt = {scenario.dt}'

    lines = [
        f'{axis_name}收敛性研究: {scenario.name or "custom"}',
        '=' * 48,
        f'固定参数: {fixed}, T = {scenario.T}, delta = {scenario.delta}',
        f'参考解: {reference}（自收敛，无解析解）',
        '',
        f'{level_name:>10}  {"max误差":>14}  {"L2w误差":>14}',
    ]
    for error in study.errors:
        lines.append(f'{error.level:>10g}  {_fmt(error.max_error):>14}  {_fmt(error.l2_error):>14}')
    lines.append('')
    lines.append('观测阶 (max / L2w):')
    for (coarse, fine), order_max, order_l2 in zip(
        zip(study.errors, study.errors[1:]), study.observed_orders, study.observed_orders_l2
    ):
        lines.append(f'  {coarse.level:g} -> {fine.level:g}: {order_max:.4f} / {order_l2:.4f}')
    lines.append('')
    lines.append(f'误差单调不增: {"是" if study.monotone else "否"}')
    return '\n'.join(lines) + '\n'


def render_gap_report(table: GapTable) -> str:
    lines = [f'算子差异研究 (delta = {table.delta})', '=' * 48]
    for pair in table.pairs:
        lines.append(f'{pair}:')
        for row in table.rows:
            if row.pair == pair:
                lines.append(f'  N = {row.N:>4}: {_fmt(row.gap)}')
        lines.append(f'  单调不增: {"是" if table.monotone(pair) else "否"}')
    return '\n'.join(lines) + '\n'


def render_monitor_report(record: RunRecord) -> str:
    """运行监控摘要"""
    summary = monitor_summary(record)
    diagnostics = record.diagnostics
    scenario = record.scenario
    lines = [
        f'运行摘要: {scenario.name or "custom"}',
        '=' * 48,
        f'N = {scenario.N}, dt = {scenario.dt}, T = {scenario.T}, delta = {scenario.delta}',
        f'完成: {"是" if summary.complete else "否"}',
        f'时间步数: {diagnostics.step_count}',
        f'耗时: {diagnostics.wall_time:.3f} s',
        f'稳定性泛函上确界: {_fmt(summary.stability_sup)}',
        f'后半段增长比: {_fmt(summary.growth_ratio)}',
        f'极大值原理越界次数: {summary.violation_count}',
    ]
    if diagnostics.violations:
        preview = ', '.join(str(step) for step in diagnostics.violations[:10])
        lines.append(f'越界时间步: {preview}')
    if diagnostics.error:
        lines.append(f'错误: {diagnostics.error}')
    return '\n'.join(lines) + '\n'
