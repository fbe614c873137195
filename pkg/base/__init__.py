"""
基础模块
数值参数验证器与通用工具
"""
