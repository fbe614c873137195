"""
结果文件导出
剖面CSV、SVG剖面图、收敛性研究表与文本报告
"""

import csv
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from base.utils import NumberUtils
from solver.time_stepper import RunRecord
from utils.exceptions import OutputError

from .reports import GAP_HEADER, STUDY_HEADER, gap_rows, study_rows

SVG_WIDTH = 800
SVG_HEIGHT = 600
SVG_DPI = 72
SVG_HASH_SALT = 'peri-richards'


def _output_error(path: Path, e: OSError) -> OutputError:
    return OutputError(f'无法写入 {path}: {e.strerror or e}', path=str(path))


@contextmanager
def _open_for_write(path):
    """
    先写入同目录下的临时文件，成功后替换目标文件
    写出过程中失败时删除临时文件，目标路径保持原样
    """
    path = Path(path)
    tmp_path = path.with_name(path.name + '.tmp')
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        handle = tmp_path.open('w', encoding='utf-8', newline='')
    except OSError as e:
        raise _output_error(path, e) from e

    try:
        with handle:
            yield handle
        os.replace(tmp_path, path)
    except BaseException as exc:
        tmp_path.unlink(missing_ok=True)
        if isinstance(exc, OSError):
            raise _output_error(path, exc) from exc
        raise


def _write_rows(path, header: Sequence[str], rows: Iterable[Sequence[str]]):
    with _open_for_write(path) as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def time_label(seconds: float) -> str:
    return f't={NumberUtils.format_seconds(seconds)}'


def write_profiles_csv(record: RunRecord, path):
    """
    剖面CSV：第一列为物理深度 z_cm（递增），其余每列一个输出时刻

    Raises:
        OutputError: 运行记录不完整或路径不可写
    """
    if not record.diagnostics.complete:
        raise OutputError('运行未完成，不能导出剖面')
    header = ['z_cm'] + [time_label(snapshot.requested_t) for snapshot in record.snapshots]
    z_cm = record.z_cm
    order = sorted(range(len(z_cm)), key=lambda h: z_cm[h])
    rows = (
        [NumberUtils.format_float(z_cm[h])] + [NumberUtils.format_float(s.values[h]) for s in record.snapshots]
        for h in order
    )
    _write_rows(path, header, rows)


def write_profiles_svg(record: RunRecord, path):
    """SVG剖面图：每个输出时刻一条曲线，横轴 z (cm)，纵轴 θ"""
    if not record.diagnostics.complete:
        raise OutputError('运行未完成，不能绘制剖面')

    figure = Figure(figsize=(SVG_WIDTH / SVG_DPI, SVG_HEIGHT / SVG_DPI), dpi=SVG_DPI)
    FigureCanvasSVG(figure)
    axes = figure.add_subplot()
    for index, snapshot in enumerate(record.snapshots):
        axes.plot(record.z_cm, snapshot.values, label=f'{time_label(snapshot.requested_t)} s',
                  gid=f'profile-{index}')
    axes.set_xlabel('z (cm)')
    axes.set_ylabel('θ')
    title = record.scenario.name or 'custom'
    axes.set_title(f'{title}: N={record.scenario.N}, dt={record.scenario.dt}')
    axes.legend(loc='best')
    axes.grid(True, alpha=0.3)

    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none'}):
        with _open_for_write(path) as handle:
            figure.savefig(handle, format='svg', metadata={'Date': None})


def _write_table(header, rows, path):
    _write_rows(path, header, ([str(value) for value in row] for row in rows))


def write_study_csv(study, path):
    """收敛性研究表"""
    _write_table(STUDY_HEADER, study_rows(study), path)


def write_gap_csv(table, path):
    """算子差异表"""
    _write_table(GAP_HEADER, gap_rows(table), path)


def write_text(text: str, path):
    with _open_for_write(path) as handle:
        handle.write(text)
