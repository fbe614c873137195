"""pytest 接入：加载 Django 设置（测试基于 django.test.SimpleTestCase）"""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'main.settings')
django.setup()
